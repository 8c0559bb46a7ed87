"""Exception classes shared across the toolkit.

Every error raised by the library derives from LidsError so callers can
catch the whole family at an ingestion or pipeline boundary.
"""


class LidsError(Exception):
    pass


# ── embedding store ─────────────────────────────────────────────────

class StoreError(LidsError):
    pass


class BadMagic(StoreError):
    pass


class UnsupportedVersion(StoreError):
    pass


class TruncatedFile(StoreError):
    pass


class TrailingData(StoreError):
    pass


class NonFiniteEntry(StoreError):
    pass


class TokenCountMismatch(StoreError):
    pass


class InvalidTokenRecord(StoreError):
    pass


class BadDimensions(StoreError):
    pass


class MalformedDebugJson(StoreError):
    pass


class AllRowsZero(StoreError):
    pass


# ── SVD layers / direction vectors ──────────────────────────────────

class ZeroMatrix(LidsError):
    pass


class NumericalFailure(LidsError):
    pass


class LayerOutOfRange(LidsError):
    pass


# ── similarity metric ───────────────────────────────────────────────

class DimensionMismatch(LidsError):
    pass


class EmptyCurve(LidsError):
    pass


# ── baseline summaries ──────────────────────────────────────────────

class EmptyReference(LidsError):
    pass


class MissingFile(LidsError):
    pass


class EmptyText(LidsError):
    pass


class MalformedManifest(LidsError):
    pass


# ── reference metrics ───────────────────────────────────────────────

class EmptyInput(LidsError):
    pass


class DegenerateTokenWarning(UserWarning):
    """A token row is all-zero and was excluded from matching."""


# ── layer inference ─────────────────────────────────────────────────

class RankTooLarge(LidsError):
    pass


class ZeroSingularValue(LidsError):
    pass


class LengthMismatch(LidsError):
    pass


# ── evaluation report ───────────────────────────────────────────────

class ZeroDispersion(LidsError):
    pass


class DegenerateRange(LidsError):
    pass


class ZeroVariance(LidsError):
    pass


class ZeroDistanceVariance(LidsError):
    pass
