import json
import math

import pytest

from dyadic_spaces import CubeSequence, DyadicCube, save_jsonl
from dyadic_spaces.cli import main, parse_extended
from fractions import Fraction


@pytest.fixture()
def single_cube_file(tmp_path):
    path = tmp_path / "single.jsonl"
    save_jsonl(CubeSequence.from_values({DyadicCube.unit(1): 1.0}), path)
    return path


def run(args, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, out.read_bytes() if out.exists() else b""


class TestParse:
    def test_rationals_and_inf(self):
        assert parse_extended("1/2") == Fraction(1, 2)
        assert parse_extended("inf") == math.inf
        assert parse_extended("3") == 3
        assert parse_extended("0.25") == 0.25


class TestNorm:
    def test_single_cube_norm(self, single_cube_file, tmp_path):
        code, raw = run(
            ["norm", "--family", "f", "--s", "0", "--tau", "0", "--p", "2",
             "--q", "2", "--in", str(single_cube_file)],
            tmp_path,
        )
        assert code == 0
        doc = json.loads(raw)
        assert doc["linear"] == 1.0
        assert doc["log2"] == 0.0
        assert doc["attained_at"] == {"j": 0, "k": [0]}
        assert doc["config"]["command"] == "norm"

    def test_cmo_matches_f_route(self, tmp_path):
        import numpy as np
        from dyadic_spaces.equivalence import random_sequence

        seq = random_sequence(np.random.default_rng(0), 1, 5)
        path = tmp_path / "t.jsonl"
        save_jsonl(seq, path)
        code1, raw1 = run(
            ["norm", "--family", "cmo", "--s", "0", "--q", "2", "--r", "2",
             "--in", str(path)],
            tmp_path, "a.json",
        )
        code2, raw2 = run(
            ["norm", "--family", "f", "--s", "0", "--tau", "1", "--p", "2",
             "--q", "2", "--in", str(path)],
            tmp_path, "b.json",
        )
        assert code1 == code2 == 0
        v1 = json.loads(raw1)["log2"]
        v2 = json.loads(raw2)["log2"]
        assert v1 == pytest.approx(v2, rel=1e-12)

    def test_b_with_both_infinite_exponents(self, single_cube_file, tmp_path):
        code, raw = run(
            ["norm", "--family", "b", "--s", "0", "--tau", "0", "--p", "inf",
             "--q", "inf", "--in", str(single_cube_file)],
            tmp_path,
        )
        assert code == 0
        assert json.loads(raw)["linear"] == 1.0

    def test_parse_error_exit_2(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("not json\n")
        code = main(["norm", "--family", "f", "--in", str(bad)])
        assert code == 2

    def test_missing_file_exit_2(self):
        code = main(["norm", "--family", "f", "--in", "/nonexistent/x.jsonl"])
        assert code == 2

    def test_invalid_params_exit_3(self, single_cube_file):
        code = main(
            ["norm", "--family", "f", "--tau", "-1", "--in", str(single_cube_file)]
        )
        assert code == 3
        code = main(
            ["norm", "--family", "f", "--p", "inf", "--in", str(single_cube_file)]
        )
        assert code == 3


class TestWitness:
    def test_verified_pair_exit_0(self, tmp_path):
        code, raw = run(
            ["witness", "--s", "0", "--tau", "1/2", "--p", "1", "--q", "2",
             "--depths", "4,8,16"],
            tmp_path,
        )
        assert code == 0
        doc = json.loads(raw)
        assert doc["divergent"]["verdict"] == "diverges"
        assert doc["bounded"]["verdict"] == "bounded"

    def test_depth_zero_single_cube_values(self, tmp_path):
        code, raw = run(
            ["witness", "--s", "0", "--tau", "1/2", "--p", "1", "--q", "2",
             "--depths", "0"],
            tmp_path,
        )
        doc = json.loads(raw)
        assert doc["divergent"]["log2_values"] == [0.0]
        assert doc["bounded"]["log2_values"] == [0.0]

    def test_invalid_region_exit_3(self, tmp_path):
        code = main(["witness", "--s", "0", "--tau", "2", "--p", "1", "--q", "2"])
        assert code == 3


class TestEquiv:
    def test_collapse_f_small_sweep(self, tmp_path):
        code, raw = run(
            ["equiv", "--check", "collapse-f", "--s", "0", "--tau", "3/2", "--p", "1",
             "--q", "2", "--samples", "40", "--depth", "6"],
            tmp_path,
        )
        assert code == 0
        doc = json.loads(raw)
        assert doc["all_ok"] is True
        assert doc["worst_ratio_low"] >= 1 - 1e-9

    def test_csv_rows(self, tmp_path):
        code, raw = run(
            ["equiv", "--check", "identities", "--s", "0", "--p", "2", "--q", "2",
             "--r", "1", "--samples", "10", "--format", "csv"],
            tmp_path, "rows.csv",
        )
        assert code == 0
        lines = raw.decode().splitlines()
        assert lines[0] == "sample_id,ratio_low,ratio_high,config"
        assert len(lines) > 1


class TestClassify:
    def test_report_shape(self, tmp_path):
        code, raw = run(
            ["classify", "--family", "f", "--s", "0", "--tau", "3/2", "--p", "1",
             "--q", "2"],
            tmp_path,
        )
        assert code == 0
        rep = json.loads(raw)["report"]
        assert rep["verdict"] == "F_inf_inf"
        assert rep["target_params"]["s_eff"] == 0.5

    def test_exact_rational_boundary(self, tmp_path):
        code, raw = run(
            ["classify", "--family", "b", "--s", "0", "--tau", "1/3", "--p", "3",
             "--q", "2"],
            tmp_path,
        )
        rep = json.loads(raw)["report"]
        assert rep["verdict"] == "strict_superset_B_inf_q"
        assert not any("tolerance" in n for n in rep["notes"])


class TestRefute:
    def test_bundle_verified(self, tmp_path):
        code, raw = run(
            ["refute", "--s", "0", "--tau", "1/2", "--p", "1", "--q", "2",
             "--depths", "4,8,16"],
            tmp_path,
        )
        assert code == 0
        doc = json.loads(raw)
        assert doc["verified"] is True

    def test_rejected_cites_rule(self, capsys, tmp_path):
        code = main(["refute", "--s", "0", "--tau", "2", "--p", "1", "--q", "2"])
        assert code == 3
        assert "Corollary 4" in capsys.readouterr().err


class TestSweep:
    def test_csv_grid(self, tmp_path):
        code, raw = run(
            ["sweep", "--family", "f", "--tau-grid", "0,1/4,2", "--p-grid", "1,2",
             "--q-grid", "2,inf", "--samples", "5", "--format", "csv"],
            tmp_path, "sweep.csv",
        )
        assert code == 0
        lines = raw.decode().splitlines()
        assert lines[0].startswith("tau,p,q,verdict,rule")
        assert len(lines) == 1 + 3 * 2 * 2


class TestAnalyze:
    def test_json_report(self, tmp_path):
        code, raw = run(
            ["analyze", "--L", "8", "--signal", "harmonic", "--j0", "3"],
            tmp_path,
        )
        assert code == 0
        doc = json.loads(raw)
        assert doc["bank"]["lower_bound_constant"] > 0
        assert doc["consistency"]["band_limited"] is True


class TestThreadsEnv:
    def test_env_var_fallback(self, tmp_path, monkeypatch, single_cube_file):
        monkeypatch.setenv("DYADIC_SPACES_THREADS", "3")
        code, raw = run(
            ["equiv", "--check", "collapse-f", "--s", "0", "--tau", "3/2", "--p", "1",
             "--q", "2", "--samples", "12"],
            tmp_path, "env.json",
        )
        assert code == 0
        monkeypatch.delenv("DYADIC_SPACES_THREADS")
        _, raw2 = run(
            ["equiv", "--check", "collapse-f", "--s", "0", "--tau", "3/2", "--p", "1",
             "--q", "2", "--samples", "12"],
            tmp_path, "noenv.json",
        )
        assert raw == raw2


class TestDeterminism:
    @pytest.mark.parametrize(
        "args",
        [
            ["equiv", "--check", "collapse-b", "--s", "0", "--tau", "3/2", "--p", "1",
             "--q", "2", "--samples", "30", "--seed", "7"],
            ["equiv", "--check", "holder", "--s", "0", "--tau", "1/4", "--p", "1",
             "--q", "2", "--samples", "25", "--seed", "9", "--format", "csv"],
            ["sweep", "--tau-grid", "0,2", "--p-grid", "1", "--q-grid", "2",
             "--samples", "8", "--seed", "3", "--format", "csv"],
            ["witness", "--s", "0", "--tau", "1/2", "--p", "1", "--q", "2",
             "--depths", "4,8"],
            ["analyze", "--L", "8", "--seed", "5"],
        ],
    )
    def test_byte_identical_across_thread_counts(self, args, tmp_path):
        outs = []
        for threads, name in ((1, "t1"), (4, "t4"), (1, "collapse-b")):
            _, raw = run(args + ["--threads", str(threads)], tmp_path, name)
            outs.append(raw)
        assert outs[0] == outs[1] == outs[2]
