"""Subcommand behavior: reports, exit codes, file outputs."""

from __future__ import annotations

import json

import numpy as np
import numpy.testing as npt
import pytest

from colligate import (
    HermitianKernel,
    disc_table,
    evaluate_all,
    load_colligation,
    product,
    save_colligation,
    save_kernel,
    save_table,
    save_values,
    save_witness,
    szego_samples,
)
from colligate.cli import main
from conftest import blaschke_colligation, coordinate_colligation, invertible_pair


@pytest.fixture()
def workdir(tmp_path):
    col = blaschke_colligation()
    save_colligation(col, str(tmp_path / "blaschke.json"))
    save_witness({"A": np.array([[0.5]])}, str(tmp_path / "half.json"))
    save_witness({"A": np.array([[1.0 / 3.0]])}, str(tmp_path / "third.json"))
    table = disc_table([0.0, 0.5, -1.0 / 3.0, 0.25j])
    save_table(table, str(tmp_path / "table.json"))
    squared = product(coordinate_colligation(table), coordinate_colligation(table))
    save_colligation(squared, str(tmp_path / "squared.json"))
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestEval:
    def test_all_points(self, workdir, capsys):
        code, report = run(capsys, "eval", workdir / "blaschke.json")
        assert code == 0
        assert [e["index"] for e in report["evaluations"]] == [0, 1, 2, 3]
        value = report["evaluations"][1]["value"]
        assert value[0][0][0] == pytest.approx(0.4, abs=1e-12)

    def test_single_point(self, workdir, capsys):
        code, report = run(capsys, "eval", workdir / "blaschke.json", "--point", "2")
        assert code == 0
        assert len(report["evaluations"]) == 1
        assert report["evaluations"][0]["label"] == "(-0.3333333333333333+0j)"

    def test_out_of_range_point(self, workdir, capsys):
        code, report = run(capsys, "eval", workdir / "blaschke.json", "--point", "9")
        assert code == 2
        assert report["error"] == "StructureError"

    def test_missing_file(self, workdir, capsys):
        code, report = run(capsys, "eval", workdir / "nope.json")
        assert code == 2
        assert report["error"] == "FileNotFoundError"

    def test_reports_carry_input_digests(self, workdir, capsys):
        code, report = run(capsys, "eval", workdir / "blaschke.json")
        digest = report["inputs"][str(workdir / "blaschke.json")]
        assert digest.startswith("sha256:")


class TestCheck:
    def test_passing_witness(self, workdir, capsys):
        code, report = run(
            capsys,
            "check",
            workdir / "blaschke.json",
            "--variant",
            "vanishing-selfadjoint",
            "--witness",
            workdir / "half.json",
        )
        assert code == 0
        assert report["verdict"] is True
        assert report["witness_source"] == "file"
        assert max(report["residuals"].values()) <= 1e-12

    def test_failing_witness_reports_the_residual(self, workdir, capsys):
        code, report = run(
            capsys,
            "check",
            workdir / "blaschke.json",
            "--variant",
            "vanishing-selfadjoint",
            "--witness",
            workdir / "third.json",
        )
        assert code == 1
        assert report["verdict"] is False
        assert report["residuals"]["gram_match"] == 5.0 / 36.0

    def test_auto_search_for_both_vanishing(self, workdir, capsys):
        code, report = run(
            capsys,
            "check",
            workdir / "squared.json",
            "--variant",
            "both-vanishing",
            "--auto",
        )
        assert code == 0
        assert report["witness_source"] == "auto"
        assert report["witnesses"]["L"] == [[[1.0, 0.0]]]
        assert report["witnesses"]["Y"] == [[[1.0, 0.0]]]

    def test_auto_search_failure_is_a_false_verdict(self, workdir, capsys):
        code, report = run(
            capsys,
            "check",
            workdir / "blaschke.json",
            "--variant",
            "both-vanishing",
            "--auto",
        )
        assert code == 1
        assert report["verdict"] is False
        assert report["residuals"]["c1_vanishes"] == 0.5

    def test_missing_witness_without_auto(self, workdir, capsys):
        code, report = run(
            capsys, "check", workdir / "squared.json", "--variant", "both-vanishing"
        )
        assert code == 2
        assert report["error"] == "StructureError"

    def test_general_auto_completes_the_tuple(self, workdir, capsys, tmp_path):
        first, second, parent = invertible_pair(2, 3, 3, 2, seed=11)
        save_colligation(parent, str(tmp_path / "parent.json"))
        save_witness(
            {"A1": first.A, "A2": second.A}, str(tmp_path / "pair.json")
        )
        code, report = run(
            capsys,
            "check",
            tmp_path / "parent.json",
            "--variant",
            "general",
            "--witness",
            tmp_path / "pair.json",
            "--auto",
        )
        assert code == 0
        assert report["witness_source"] == "auto"
        assert set(report["witnesses"]) == {"A1", "A2", "X1", "Y2"}

    def test_general_solver_failure_carries_residuals(self, workdir, capsys, tmp_path):
        save_witness(
            {"A1": np.zeros((1, 1)), "A2": np.zeros((1, 1))},
            str(tmp_path / "zeros.json"),
        )
        code, report = run(
            capsys,
            "check",
            workdir / "squared.json",
            "--variant",
            "general",
            "--witness",
            tmp_path / "zeros.json",
            "--auto",
        )
        assert code == 1
        assert report["verdict"] is False
        assert report["residuals"]["d2_splits"] == 1.0


class TestFactor:
    def test_writes_two_loadable_factors(self, workdir, capsys):
        stem = workdir / "out"
        code, report = run(
            capsys,
            "factor",
            workdir / "blaschke.json",
            "--variant",
            "vanishing-selfadjoint",
            "--witness",
            workdir / "half.json",
            "-o",
            stem,
        )
        assert code == 0
        assert report["product_residual"] <= 1e-12
        first = load_colligation(str(stem) + ".f1.json")
        second = load_colligation(str(stem) + ".f2.json")
        npt.assert_allclose(first.matrix(), [[0.0, 1.0], [1.0, 0.0]], atol=1e-12)
        r = np.sqrt(3.0) / 2.0
        npt.assert_allclose(second.matrix(), [[0.5, r], [r, -0.5]], atol=1e-12)

    def test_failing_witness_writes_nothing(self, workdir, capsys):
        stem = workdir / "bad"
        code, report = run(
            capsys,
            "factor",
            workdir / "blaschke.json",
            "--variant",
            "vanishing-selfadjoint",
            "--witness",
            workdir / "third.json",
            "-o",
            stem,
        )
        assert code == 1
        assert report["verdict"] is False
        assert not (workdir / "bad.f1.json").exists()

    def test_round_trip_through_verify(self, workdir, capsys):
        stem = workdir / "sq"
        code, _ = run(
            capsys,
            "factor",
            workdir / "squared.json",
            "--variant",
            "both-vanishing",
            "--auto",
            "-o",
            stem,
        )
        assert code == 0
        code, report = run(
            capsys,
            "verify",
            workdir / "squared.json",
            str(stem) + ".f1.json",
            str(stem) + ".f2.json",
        )
        assert code == 0
        assert report["residual"] <= 1e-12


class TestMultiplyVerifyRandom:
    def test_multiply_reproduces_the_square(self, workdir, capsys):
        out = workdir / "prod.json"
        code, report = run(
            capsys,
            "multiply",
            workdir / "blaschke.json",
            workdir / "blaschke.json",
            "-o",
            out,
        )
        assert code == 0
        assert report["split"] == [2, 2]
        col = load_colligation(str(out))
        stack = evaluate_all(col)
        assert stack[1][0, 0] == pytest.approx(0.16, abs=1e-12)

    def test_verify_flags_a_wrong_parent(self, workdir, capsys):
        code, report = run(
            capsys,
            "verify",
            workdir / "squared.json",
            workdir / "blaschke.json",
            workdir / "blaschke.json",
        )
        assert code == 1
        assert report["verdict"] is False
        assert report["residual"] > 1e-3

    def test_random_is_deterministic_per_seed(self, workdir, capsys):
        a = workdir / "r1.json"
        b = workdir / "r2.json"
        for out in (a, b):
            code, report = run(
                capsys,
                "random",
                "--table",
                workdir / "table.json",
                "--value-dim",
                "2",
                "--state-dims",
                "3,2",
                "--seed",
                "5",
                "-o",
                out,
            )
            assert code == 0
            assert report["isometry_defect"] < 1e-12
        assert a.read_bytes() == b.read_bytes()
        col = load_colligation(str(a))
        col.validate(1e-9)
        assert col.rep.split == (3, 2)

    def test_random_rejects_malformed_dims(self, workdir, capsys):
        code, report = run(
            capsys,
            "random",
            "--table",
            workdir / "table.json",
            "--value-dim",
            "1",
            "--state-dims",
            "3",
            "-o",
            workdir / "r.json",
        )
        assert code == 2
        assert report["error"] == "StructureError"


class TestAdmissibleAndNormBound:
    def test_szego_kernel_is_admissible(self, workdir, capsys):
        zs = [0.0, 0.5, -1.0 / 3.0, 0.25j]
        save_kernel(szego_samples(zs), str(workdir / "szego.json"))
        code, report = run(
            capsys, "admissible", workdir / "szego.json", workdir / "table.json"
        )
        assert code == 0
        assert report["verdict"] is True

    def test_constant_kernel_is_not(self, workdir, capsys):
        zs = [0.0, 0.5, -1.0 / 3.0, 0.25j]
        pts = szego_samples(zs).points
        ones = HermitianKernel(pts, np.ones((4, 4, 1, 1), dtype=complex))
        save_kernel(ones, str(workdir / "ones.json"))
        code, report = run(
            capsys, "admissible", workdir / "ones.json", workdir / "table.json"
        )
        assert code == 1
        assert report["verdict"] is False

    def test_norm_bound_for_the_doubled_coordinate(self, workdir, capsys):
        zs = [0.0, 0.5]
        save_kernel(szego_samples(zs), str(workdir / "s2.json"))
        table = disc_table(zs)
        stack = np.array([[[2.0 * z]] for z in zs], dtype=complex)
        save_values(table.points, stack, str(workdir / "vals.json"))
        code, report = run(
            capsys,
            "norm-bound",
            workdir / "vals.json",
            "--kernels",
            workdir / "s2.json",
        )
        assert code == 0
        assert report["bound"] == pytest.approx(2.0, abs=1e-8)

    def test_label_mismatch_is_rejected(self, workdir, capsys):
        save_kernel(szego_samples([0.0, 0.5]), str(workdir / "s2.json"))
        table = disc_table([0.0, 0.5, -1.0 / 3.0, 0.25j])
        stack = np.zeros((4, 1, 1), dtype=complex)
        save_values(table.points, stack, str(workdir / "v4.json"))
        code, report = run(
            capsys,
            "norm-bound",
            workdir / "v4.json",
            "--kernels",
            workdir / "s2.json",
        )
        assert code == 2
        assert report["error"] == "StructureError"


class TestArgumentErrors:
    def test_no_subcommand_exits_two(self):
        with pytest.raises(SystemExit) as info:
            main([])
        assert info.value.code == 2

    def test_unknown_variant_exits_two(self, workdir):
        with pytest.raises(SystemExit) as info:
            main(
                [
                    "check",
                    str(workdir / "blaschke.json"),
                    "--variant",
                    "sideways",
                ]
            )
        assert info.value.code == 2
