"""CLI contract: output shapes, exit codes, configuration, determinism."""

import json
import subprocess
import sys
from pathlib import Path

import numpy as np

from helpers import rand_text
from lids.cli import main, parse_config_file
from lids.store import save_embedded_text

FIXTURES = Path(__file__).parent / "fixtures"


def write_text_file(tmp_path, name, seed=0, n=8, p=5):
    t = rand_text(np.random.default_rng(seed), n, p)
    path = tmp_path / name
    path.write_bytes(save_embedded_text(t))
    return path


def run_cli(args, capsys):
    code = main([str(a) for a in args])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestScoreCommand:
    def test_self_score_prints_one(self, tmp_path, capsys):
        ref = write_text_file(tmp_path, "ref.lids")
        code, out, err = run_cli(["score", "--reference", ref, ref], capsys)
        assert code == 0
        rec = json.loads(out.strip())
        assert rec["score"] == 1.0
        assert rec["k_hat"] == 1
        assert rec["path"] == str(ref)

    def test_input_order_preserved(self, tmp_path, capsys):
        ref = write_text_file(tmp_path, "ref.lids", seed=0, n=10)
        files = [write_text_file(tmp_path, f"s{i}.lids", seed=i + 1) for i in range(3)]
        code, out, _ = run_cli(["score", "--reference", ref, *files], capsys)
        assert code == 0
        lines = [json.loads(l) for l in out.strip().splitlines()]
        assert [l["path"] for l in lines] == [str(f) for f in files]

    def test_missing_file_exits_2_and_names_path(self, tmp_path, capsys):
        ref = write_text_file(tmp_path, "ref.lids")
        code, _, err = run_cli(
            ["score", "--reference", ref, tmp_path / "nope.lids"], capsys
        )
        assert code == 2
        assert "nope.lids" in err

    def test_corrupt_file_exits_2(self, tmp_path, capsys):
        ref = write_text_file(tmp_path, "ref.lids")
        bad = tmp_path / "bad.lids"
        bad.write_bytes(b"XIDS garbage")
        code, _, err = run_cli(["score", "--reference", ref, bad], capsys)
        assert code == 2
        assert "bad.lids" in err and "BadMagic" in err

    def test_emit_embeddings(self, tmp_path, capsys):
        ref = write_text_file(tmp_path, "ref.lids", seed=0, n=10)
        s = write_text_file(tmp_path, "sum.lids", seed=3)
        out_dir = tmp_path / "out"
        code, _, _ = run_cli(
            ["score", "--reference", ref, s, "--emit-embeddings", "--out", out_dir],
            capsys,
        )
        assert code == 0
        payload = json.loads((out_dir / "sum.embedding.json").read_text())
        assert payload["path"] == str(s)
        assert len(payload["embedding"]) == 5
        assert payload["alpha"] == 1.0

    def test_fixture_bundle_scores(self, capsys):
        files = sorted(FIXTURES.glob("good_*.lids"))
        code, out, _ = run_cli(
            ["score", "--reference", FIXTURES / "article.lids", *files], capsys
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 10
        assert all(0.9 <= json.loads(l)["score"] <= 1.0 for l in lines)

    def test_byte_identical_across_processes(self, tmp_path):
        env_cmd = [
            sys.executable,
            "-m",
            "lids.cli",
            "score",
            "--reference",
            str(FIXTURES / "article.lids"),
            str(FIXTURES / "good_01.lids"),
            str(FIXTURES / "naive_01.lids"),
        ]
        a = subprocess.run(env_cmd, capture_output=True, cwd=tmp_path)
        b = subprocess.run(env_cmd, capture_output=True, cwd=tmp_path)
        assert a.returncode == b.returncode == 0
        assert a.stdout == b.stdout


class TestBaselineCommand:
    def test_writes_count_files_of_target_len(self, tmp_path, capsys):
        src = tmp_path / "article.txt"
        src.write_text("the cat sat on the mat and looked about quietly")
        out_dir = tmp_path / "base"
        code, out, _ = run_cli(
            ["baseline", "--reference", src, "--mode", "naive", "--count", "5",
             "--target-len", "12", "--seed", "9", "--out", out_dir],
            capsys,
        )
        assert code == 0
        files = sorted(out_dir.glob("naive_*.txt"))
        assert [f.name for f in files] == [f"naive_{i}.txt" for i in range(1, 6)]
        for f in files:
            assert len(f.read_text().split(" ")) == 12
        meta = [json.loads(l) for l in out.strip().splitlines()]
        assert [m["seed"] for m in meta] == [10, 11, 12, 13, 14]

    def test_fifty_files_of_150_words(self, tmp_path, capsys):
        src = tmp_path / "article.txt"
        src.write_text(" ".join(f"word{i}" for i in range(120)))
        out_dir = tmp_path / "base"
        code, _, _ = run_cli(
            ["baseline", "--reference", src, "--count", "50", "--target-len", "150",
             "--seed", "1", "--out", out_dir],
            capsys,
        )
        assert code == 0
        files = sorted(out_dir.glob("naive_*.txt"))
        assert len(files) == 50
        assert all(len(f.read_text().split(" ")) == 150 for f in files)

    def test_count_zero_writes_nothing(self, tmp_path, capsys):
        src = tmp_path / "a.txt"
        src.write_text("words here")
        out_dir = tmp_path / "base"
        code, out, _ = run_cli(
            ["baseline", "--reference", src, "--count", "0", "--target-len", "5",
             "--out", out_dir],
            capsys,
        )
        assert code == 0
        assert not list(out_dir.glob("naive_*.txt"))

    def test_same_seed_identical_bytes(self, tmp_path, capsys):
        src = tmp_path / "a.txt"
        src.write_text("alpha beta gamma delta epsilon zeta")
        outs = []
        for d in ("one", "two"):
            out_dir = tmp_path / d
            code, _, _ = run_cli(
                ["baseline", "--reference", src, "--count", "3", "--target-len", "20",
                 "--seed", "77", "--out", out_dir],
                capsys,
            )
            assert code == 0
            outs.append([f.read_bytes() for f in sorted(out_dir.glob("*.txt"))])
        assert outs[0] == outs[1]

    def test_unreadable_reference_exits_2(self, tmp_path, capsys):
        code, _, err = run_cli(
            ["baseline", "--reference", tmp_path / "missing.txt", "--count", "1",
             "--target-len", "5"],
            capsys,
        )
        assert code == 2


class TestKeywordsCommand:
    def make_signal_file(self, tmp_path, seed=0, n=30, p=20):
        rng = np.random.default_rng(seed)
        from test_inference import signal_text

        t, planted = signal_text(rng, n=n, p=p)
        path = tmp_path / "summary.lids"
        path.write_bytes(save_embedded_text(t))
        return path, planted

    def test_explicit_layers_writes_cloud_json(self, tmp_path, capsys):
        path, planted = self.make_signal_file(tmp_path)
        out_dir = tmp_path / "clouds"
        code, out, _ = run_cli(
            ["keywords", path, "--layers", "3", "--q", "0.005", "--out", out_dir],
            capsys,
        )
        assert code == 0
        obj = json.loads((out_dir / "summary_clouds.json").read_text())
        assert len(obj["layers"]) == 3
        assert obj["method"] == "sofari-approx-plugin"
        selected = {
            w["word"] for w in obj["layers"][0]["words"] if w["selected"]
        }
        assert planted <= selected

    def test_q_near_one_selects_all(self, tmp_path, capsys):
        path, _ = self.make_signal_file(tmp_path, seed=1)
        out_dir = tmp_path / "clouds"
        code, _, _ = run_cli(
            ["keywords", path, "--layers", "1", "--q", "0.999999", "--out", out_dir],
            capsys,
        )
        assert code == 0
        obj = json.loads((out_dir / "summary_clouds.json").read_text())
        words = obj["layers"][0]["words"]
        assert all(w["selected"] for w in words if w["pvalue"] < 1.0)

    def test_layers_too_large_exits_2_with_rank_text(self, tmp_path, capsys):
        path, _ = self.make_signal_file(tmp_path, n=10, p=5)
        code, _, err = run_cli(["keywords", path, "--layers", "5"], capsys)
        assert code == 2
        assert "RankTooLarge" in err

    def test_reference_drives_k_hat(self, tmp_path, capsys):
        ref = write_text_file(tmp_path, "ref.lids", seed=5, n=25, p=12)
        path, _ = self.make_signal_file(tmp_path, seed=6, n=20, p=12)
        out_dir = tmp_path / "clouds"
        code, _, _ = run_cli(
            ["keywords", path, "--reference", ref, "--out", out_dir], capsys
        )
        assert code in (0, 3)
        assert (out_dir / "summary_clouds.json").exists()

    def test_empty_selection_exits_3_but_writes_json(self, tmp_path, capsys):
        rng = np.random.default_rng(123)
        t = rand_text(rng, 25, 25, stop_frac=0.0)
        path = tmp_path / "noise.lids"
        path.write_bytes(save_embedded_text(t))
        out_dir = tmp_path / "clouds"
        code, _, _ = run_cli(
            ["keywords", path, "--layers", "2", "--q", "0.000001", "--out", out_dir],
            capsys,
        )
        assert code == 3
        obj = json.loads((out_dir / "noise_clouds.json").read_text())
        assert all(not w["selected"] for layer in obj["layers"] for w in layer["words"])

    def test_svg_format_writes_both(self, tmp_path, capsys):
        path, _ = self.make_signal_file(tmp_path, seed=2)
        out_dir = tmp_path / "clouds"
        code, _, _ = run_cli(
            ["keywords", path, "--layers", "2", "--format", "svg", "--out", out_dir],
            capsys,
        )
        assert code == 0
        assert (out_dir / "summary_clouds.json").exists()
        svg = (out_dir / "summary_clouds.svg").read_bytes()
        assert svg.startswith(b"<?xml")

    def test_emit_cloud_byte_identical(self, tmp_path, capsys):
        path, _ = self.make_signal_file(tmp_path, seed=3)
        blobs = []
        for d in ("c1", "c2"):
            out_dir = tmp_path / d
            run_cli(
                ["keywords", path, "--layers", "2", "--format", "svg", "--out", out_dir],
                capsys,
            )
            blobs.append(
                (out_dir / "summary_clouds.json").read_bytes()
                + (out_dir / "summary_clouds.svg").read_bytes()
            )
        assert blobs[0] == blobs[1]


class TestReportCommand:
    def write_scores(self, tmp_path, name, values):
        path = tmp_path / name
        path.write_text(json.dumps(values))
        return path

    def test_three_sets_give_three_sharpe_rows(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        a = self.write_scores(tmp_path, "llm.json", list(0.95 + 0.01 * rng.random(10)))
        b = self.write_scores(tmp_path, "naive.json", list(0.5 + 0.05 * rng.random(10)))
        c = self.write_scores(tmp_path, "topic.json", list(0.7 + 0.05 * rng.random(10)))
        code, out, _ = run_cli(
            ["report", f"llm={a}", f"naive={b}", f"topic={c}", "--out", tmp_path],
            capsys,
        )
        assert code == 0
        obj = json.loads((tmp_path / "report.json").read_text())
        assert set(obj["sharpe"]) == {"llm", "naive", "topic"}
        assert obj["correlations"] is None
        assert "llm" in out

    def test_human_scores_populate_correlations(self, tmp_path, capsys):
        pairs = json.loads((FIXTURES / "human_scores.json").read_text())
        metric = self.write_scores(tmp_path, "m.json", [p["metric"] for p in pairs])
        human = self.write_scores(tmp_path, "h.json", [p["human"] for p in pairs])
        code, out, _ = run_cli(
            ["report", f"llm={metric}", "--human", human, "--out", tmp_path], capsys
        )
        assert code == 0
        obj = json.loads((tmp_path / "report.json").read_text())
        assert set(obj["correlations"]) == {"pearson", "kendall", "dcor"}
        for kind in obj["correlations"].values():
            assert kind["ci_low"] <= kind["estimate"] <= kind["ci_high"]

    def test_empty_set_exits_2(self, tmp_path, capsys):
        empty = self.write_scores(tmp_path, "e.json", [])
        code, _, err = run_cli(["report", f"x={empty}"], capsys)
        assert code == 2

    def test_unparseable_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{nope")
        code, _, _ = run_cli(["report", f"x={bad}"], capsys)
        assert code == 2


class TestConfig:
    def test_parse_config_grammar(self, tmp_path):
        cfg = tmp_path / "lids.toml"
        cfg.write_text(
            "# comment line\n"
            "alpha = 2.5\n"
            "q = 0.01\n"
            "seed = 11\n"
            "mask_stopwords = true\n"
            'out = "results"\n'
        )
        values = parse_config_file(cfg)
        assert values == {
            "alpha": 2.5,
            "q": 0.01,
            "seed": 11,
            "mask_stopwords": True,
            "out": "results",
        }

    def test_env_var_config_applies(self, tmp_path, capsys, monkeypatch):
        src = tmp_path / "a.txt"
        src.write_text("alpha beta gamma delta")
        cfg = tmp_path / "custom.conf"
        out_dir = tmp_path / "cfg_out"
        cfg.write_text(f"seed = 5\nout = {out_dir}\n")
        monkeypatch.setenv("LIDS_CONFIG", str(cfg))
        code, out, _ = run_cli(
            ["baseline", "--reference", src, "--count", "1", "--target-len", "4"],
            capsys,
        )
        assert code == 0
        meta = json.loads(out.strip().splitlines()[0])
        assert meta["seed"] == 6  # config seed 5 + file index 1
        assert (out_dir / "naive_1.txt").exists()

    def test_flag_overrides_config(self, tmp_path, capsys, monkeypatch):
        src = tmp_path / "a.txt"
        src.write_text("alpha beta gamma delta")
        cfg = tmp_path / "custom.conf"
        cfg.write_text("seed = 5\n")
        monkeypatch.setenv("LIDS_CONFIG", str(cfg))
        code, out, _ = run_cli(
            ["baseline", "--reference", src, "--count", "1", "--target-len", "4",
             "--seed", "100", "--out", tmp_path / "o"],
            capsys,
        )
        assert code == 0
        meta = json.loads(out.strip().splitlines()[0])
        assert meta["seed"] == 101

    def test_invalid_alpha_rejected(self, tmp_path, capsys):
        ref = write_text_file(tmp_path, "ref.lids")
        code, _, err = run_cli(
            ["score", "--reference", ref, ref, "--alpha", "-1"], capsys
        )
        assert code == 1
        assert "alpha" in err
