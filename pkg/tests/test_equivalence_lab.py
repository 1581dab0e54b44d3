import csv
import json
import math

import numpy as np
import pytest

from sector_lab.equivalence_lab import (
    CATALOG,
    ExperimentReport,
    ModelSpec,
    build_model,
    emit_report,
    read_report,
    run_experiment,
    translation_grid,
    validate_config,
)
from sector_lab.equivalence_lab.cli import main
from sector_lab.errors import InvalidSpec, SchemaViolation, UnknownExperiment
from sector_lab.functional_calculus import imaginary_power
from sector_lab.linalg_core import ModelSpace, operator_pnorm

FAST = {
    "mellin": {"s": [0.0, 1.0], "theta": [0.0], "beta": [0.5]},
    "fourier_identity": {"theta": [0.0, 0.5], "mu": [1.0], "t": [0.0, 2.0]},
    "paley_littlewood": {"model": {"kind": "laplacian1d", "m": 8, "p": 1.5}, "vectors": 10, "samples": 1000},
    "square_suite": {"model": {"kind": "diagonal", "p": 2, "parameters": {"eigenvalues": [1.0, 2.0]}},
                     "conditions": ["3", "5"], "theta3": [2.0, 1.0], "theta5": [0.5, 1.0]},
    "multiplier_scatter": {"n_functions": 4, "restarts": 5},
    "matricial_vs_bounded": {},
    "thm_main1": {"m": 4, "n": 3},
    "mihlin_overlap": {"K": 3, "trials": 2},
}


def scrub(record):
    record = dict(record)
    record.pop("timestamp")
    return record


class TestModels:
    def test_laplacian1d(self):
        op, space = build_model(ModelSpec("laplacian1d", 3, 2.0))
        np.testing.assert_allclose(op.spectrum.real, [2 - math.sqrt(2), 2, 2 + math.sqrt(2)], atol=1e-12)
        assert space == ModelSpace(2.0, 3)

    def test_laplacian2d_kronecker_sum(self):
        op, _ = build_model(ModelSpec("laplacian2d", 2, 2.0))
        one = np.array([1.0, 3.0])
        np.testing.assert_allclose(op.spectrum.real, np.sort(np.add.outer(one, one).ravel()), atol=1e-12)

    def test_diagonal(self):
        op, _ = build_model(ModelSpec.from_dict({"kind": "diagonal", "parameters": {"eigenvalues": [3.0, 1.0]}}))
        assert op.dim == 2
        np.testing.assert_allclose(op.spectrum.real, [1.0, 3.0])

    def test_weighted_translation_shift_on_grid(self):
        op, space = build_model(ModelSpec("weighted_translation", 101, 2.0, {"alpha": 1.0, "L": 20.0}))
        xi, _ = translation_grid(101, 20.0)
        dxi = xi[1] - xi[0]
        for k in range(0, 26):
            t = k * dxi
            assert t <= 10.0 + 1e-12
            ratio = operator_pnorm(imaginary_power(op, t), space).value / math.sqrt(1 + t * t)
            assert 0.5 <= ratio <= 2.0

    def test_weighted_translation_is_a_shift(self):
        op, _ = build_model(ModelSpec("weighted_translation", 21, 2.0, {"alpha": 1.0, "L": 5.0}))
        u = imaginary_power(op, 0.5)
        x = np.zeros(21)
        x[10] = 1.0
        y = u @ x
        assert abs(abs(y[9]) - 1.0) < 1e-10 or abs(abs(y[11]) - 1.0) < 1e-10

    @pytest.mark.parametrize("bad", [
        {"kind": "nope"},
        {"kind": "diagonal", "parameters": {"eigenvalues": [1.0, -2.0]}},
        {"kind": "laplacian1d", "m": 0},
        {"kind": "laplacian1d", "m": 4, "p": 0.5},
        {"kind": "weighted_translation", "m": 11, "p": 3},
        {"kind": "laplacian1d", "size": 4},
    ])
    def test_invalid_specs(self, bad):
        with pytest.raises(InvalidSpec):
            build_model(ModelSpec.from_dict(bad))

    def test_spec_round_trip(self):
        spec = ModelSpec.from_dict({"kind": "laplacian1d", "m": 5, "p": "inf"})
        assert ModelSpec.from_dict(spec.to_dict()) == spec


class TestSchemas:
    def test_defaults_filled(self):
        cfg = validate_config("mellin", {})
        assert cfg["beta"] == [0.25, 0.5] and cfg["tol"] == 1e-6

    @pytest.mark.parametrize("kind,cfg", [
        ("mellin", {"unknown": 1}),
        ("mellin", {"tol": "small"}),
        ("mellin", {"tol": True}),
        ("square_suite", {"conditions": ["7"]}),
        ("matricial_vs_bounded", {"T_fractions": [0.75]}),
        ("mellin", {"beta": [1.5]}),
        ("paley_littlewood", {"model": {"kind": "zzz"}}),
    ])
    def test_violations(self, kind, cfg):
        with pytest.raises(SchemaViolation):
            run_experiment(kind, cfg)

    def test_unknown_kind(self):
        with pytest.raises(UnknownExperiment):
            run_experiment("nope", {})

    def test_bad_seed(self):
        with pytest.raises(SchemaViolation):
            run_experiment("fourier_identity", {}, seed=-1)


@pytest.fixture(scope="module")
def fast_reports():
    return {kind: run_experiment(kind, cfg, seed=5) for kind, cfg in FAST.items()}


class TestExperiments:
    def test_catalogue_complete(self):
        assert set(CATALOG) == set(FAST)

    @pytest.mark.parametrize("kind", sorted(FAST))
    def test_runs_and_passes(self, fast_reports, kind):
        rep = fast_reports[kind]
        assert rep.experiment == kind and rep.verdicts
        assert rep.passed, rep.verdicts

    @pytest.mark.parametrize("kind", sorted(FAST))
    def test_deterministic(self, fast_reports, kind):
        again = run_experiment(kind, FAST[kind], seed=5)
        assert again.to_record()["scalars"] == fast_reports[kind].to_record()["scalars"]
        assert again.to_record()["rows"] == fast_reports[kind].to_record()["rows"]

    def test_mellin_anchor(self, fast_reports):
        sc = fast_reports["mellin"].scalars
        assert sc["anchor_lhs"] == pytest.approx(math.pi) and sc["anchor_rhs"] == pytest.approx(math.pi, rel=1e-9)

    def test_fourier_anchor(self):
        rep = run_experiment("fourier_identity", {"theta": [0.0], "mu": [1.0], "t": [0.0]})
        row = rep.rows[0]
        assert row["lhs_re"] == 1.0 and row["rhs_re"] == pytest.approx(1.0, abs=1e-12)

    def test_paley_littlewood_hilbert(self):
        rep = run_experiment("paley_littlewood", {"model": {"kind": "laplacian1d", "m": 16, "p": 2}})
        assert math.sqrt(0.5) - 0.01 <= rep.scalars["min_ratio"] and rep.scalars["max_ratio"] <= 1.01

    def test_thm_main1_hilbert(self):
        rep = run_experiment("thm_main1", {"m": 6, "n": 4})
        assert 0.99 <= rep.scalars["ratio"] <= 1.01

    def test_degenerate_model(self):
        cfg = {"model": {"kind": "diagonal", "p": 2, "parameters": {"eigenvalues": [1.0]}},
               "s": [0.0], "theta": [0.0], "beta": [0.5]}
        assert run_experiment("mellin", cfg).passed

    def test_square_suite_monotone_and_c4(self):
        cfg = {"model": {"kind": "diagonal", "p": 2, "parameters": {"eigenvalues": [1.0, 3.0]}},
               "conditions": ["3", "4", "5"], "theta3": [2.5, 1.0, 0.3, 0.1],
               "theta5": [0.2, 1.0, 1.4, 1.5], "theta0": 1.0}
        rep = run_experiment("square_suite", cfg)
        assert rep.verdicts["C3_nonincreasing_in_abs_theta"]
        assert rep.verdicts["C5_nondecreasing_towards_boundary"]
        assert rep.verdicts["C4_matches_closed_form"]

    def test_square_suite_off_hilbert(self):
        cfg = {"model": {"kind": "laplacian1d", "m": 3, "p": 1.5}, "conditions": ["3", "5"],
               "theta3": [2.0, 0.5], "theta5": [0.3, 1.2], "trials": 4}
        rep = run_experiment("square_suite", cfg)
        assert rep.passed and "C3_matches_closed_form" not in rep.verdicts

    def test_matricial_vs_bounded_window(self, fast_reports):
        assert fast_reports["matricial_vs_bounded"].scalars["validity_window"] == 20.0

    def test_matricial_coarse_grid_does_not_saturate(self):
        cfg = {"model": {"kind": "weighted_translation", "m": 61, "p": 2, "parameters": {"alpha": 1.0, "L": 16.0}}}
        rep = run_experiment("matricial_vs_bounded", cfg)
        assert rep.verdicts["grows_below_threshold"]

    def test_multiplier_scatter_seed_stability(self):
        maxima = [run_experiment("multiplier_scatter", {"family_seed": s}).scalars["max_ratio"] for s in range(3)]
        assert max(maxima) / min(maxima) <= 1.25 / 0.75


class TestReports:
    def test_json_round_trip(self, fast_reports, tmp_path):
        rep = fast_reports["thm_main1"]
        path = tmp_path / "r.json"
        emit_report(rep, "json", str(path))
        back = read_report(str(path))
        assert back.to_record() == json.loads(path.read_text())
        assert back.seed == 5 and back.verdicts == rep.verdicts

    def test_scatter_csv_columns(self, fast_reports, tmp_path):
        path = tmp_path / "s.csv"
        emit_report(fast_reports["multiplier_scatter"], "csv", str(path))
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["f_label", "alpha", "p", "hormander_norm", "op_norm", "ratio"]
        assert len(rows) == 1 + 4

    def test_byte_identical_except_timestamp(self, tmp_path):
        paths = []
        for i in range(2):
            rep = run_experiment("fourier_identity", FAST["fourier_identity"], seed=9)
            p = tmp_path / f"{i}.json"
            emit_report(rep, "json", str(p))
            paths.append(p)
        a, b = (scrub(json.loads(p.read_text())) for p in paths)
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)

    def test_non_finite_serialised(self):
        rep = ExperimentReport("x", {}, 0, {"v": float("nan")}, ["a"], [{"a": float("inf")}], {"ok": True})
        rec = rep.to_record()
        assert rec["scalars"]["v"] == "nan" and rec["rows"][0]["a"] == "inf"
        json.dumps(rec, allow_nan=False)

    def test_bad_format(self, fast_reports, tmp_path):
        with pytest.raises(ValueError):
            emit_report(fast_reports["thm_main1"], "xml", str(tmp_path / "x"))


class TestCli:
    def test_list(self, capsys):
        assert main(["list"]) == 0
        out = capsys.readouterr().out
        assert all(kind in out for kind in CATALOG)

    def test_run_json(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(FAST["fourier_identity"]))
        out = tmp_path / "o.json"
        assert main(["fourier_identity", "--config", str(cfg), "--out", str(out), "--seed", "4"]) == 0
        assert json.loads(out.read_text())["seed"] == 4

    def test_failing_verdict_exit_code(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({**FAST["fourier_identity"], "tol": 1e-300}))
        assert main(["fourier_identity", "--config", str(cfg), "--out", str(tmp_path / "o.csv"),
                     "--format", "csv"]) == 1

    def test_schema_error_exit_code(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"bogus": 1}))
        assert main(["mellin", "--config", str(cfg)]) == 2
        assert main(["unknown_kind"]) == 2
