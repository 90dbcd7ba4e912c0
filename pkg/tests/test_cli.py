import json
import logging
import math

import numpy as np
import pytest
from lxml import etree

from lagexp.expansion import CoefficientArray
from lagexp.lagexp_base import cmd_demo_flat, main, parse_args

LAGUERRE = CoefficientArray.LAGUERRE
HERMITE = CoefficientArray.HERMITE


def run(args, code):
    with pytest.raises(SystemExit) as err:
        main(args)
    assert err.value.code == code


def write(c, path):
    assert c.save(path)
    return str(path)


def test_parse_args_defaults():
    p_args = parse_args(["demo-flat"])

    assert p_args.command == "demo-flat"
    assert p_args.log_level == logging.ERROR
    assert p_args.caps == 64
    assert not p_args.force
    assert not p_args.pretty_print
    assert p_args.handler is cmd_demo_flat


def test_parse_args_log_level():
    assert parse_args(["verify", "-d"]).log_level == logging.DEBUG
    assert parse_args(["verify", "--verbose"]).log_level == logging.INFO

    with pytest.raises(SystemExit) as err:
        parse_args(["verify", "-d", "-v"])
    assert err.value.code == 2


def test_parse_args_paths_are_resolved():
    p_args = parse_args(["reconstruct", "--coeffs", "c.json", "--x", "1.5,2"])

    assert p_args.coeffs.is_absolute()
    assert p_args.x == [1.5, 2.0]


@pytest.mark.parametrize(
    "args",
    [
        [],
        ["expand", "--fn", "l:1", "--caps", "a,b", "--out", "c.json"],
        ["basis-eval", "--kind", "chebyshev", "--n", "1", "--x", "0"],
        ["transform", "--coeffs", "c.json", "--direction", "sideways", "--out", "o"],
    ],
)
def test_usage_errors(args):
    run(args, 2)


@pytest.mark.parametrize(
    "args",
    [
        ["expand", "--fn", "l:1", "--caps", "3", "--out", "c.txt"],
        ["verify", "--report", "report.json"],
        ["classify", "--coeffs", "c.json", "--target", "finite", "--out", "r.csv"],
    ],
)
def test_file_types_are_checked(args):
    run(args, 2)


def test_directories_are_rejected(tmp_path):
    run(["reconstruct", "--coeffs", str(tmp_path), "--x", "1"], 2)


def test_expand(tmp_path, capsys):
    out = tmp_path / "c.json"
    main(["expand", "--fn", "x*exp(-x/2)", "--caps", "5", "--out", str(out)])

    c = CoefficientArray.load(out)
    np.testing.assert_allclose(c.values, [1.0, -1.0, 0, 0, 0, 0], atol=1e-12)
    assert c.meta["quad_order"] == 45
    residual = float(capsys.readouterr().out.split(":")[1])
    assert abs(residual) < 1e-10


def test_expand_with_zero_caps(tmp_path, capsys):
    out = tmp_path / "c.json"
    main(["expand", "--fn", "l:1", "--caps", "0", "--out", str(out)])

    assert CoefficientArray.load(out).caps == (0,)
    residual = float(capsys.readouterr().out.split(":")[1])
    assert residual == pytest.approx(1.0, abs=1e-10)


def test_expand_hermite_in_two_dimensions(tmp_path):
    out = tmp_path / "c.json"
    main(
        [
            "expand", "--fn", "h:2,0", "--basis", "hermite",
            "--caps", "3,2", "--out", str(out),
        ]
    )

    c = CoefficientArray.load(out)
    assert c.caps == (3, 2)
    assert c[(2, 0)] == pytest.approx(1.0, abs=1e-12)


def test_existing_output_needs_force(tmp_path):
    out = tmp_path / "c.json"
    out.write_text("keep")
    args = ["expand", "--fn", "l:1", "--caps", "3", "--out", str(out)]

    run(args, 2)
    assert out.read_text() == "keep"

    main(args + ["-f"])
    assert CoefficientArray.load(out)[1] == pytest.approx(1.0, abs=1e-12)


def test_missing_coefficient_file(tmp_path):
    run(["reconstruct", "--coeffs", str(tmp_path / "nope.json"), "--x", "1"], 2)


def test_reconstruct(tmp_path, capsys):
    coeffs = write(CoefficientArray.delta(LAGUERRE, 3, 1), tmp_path / "c.json")

    main(["reconstruct", "--coeffs", coeffs, "--x", "2"])
    assert float(capsys.readouterr().out) == pytest.approx(-math.exp(-1.0))

    run(["reconstruct", "--coeffs", coeffs, "--x", "1,2"], 2)
    run(["reconstruct", "--coeffs", coeffs, "--x", "-1"], 2)


@pytest.mark.parametrize(
    "args, expected",
    [
        (["--kind", "laguerre-poly", "--n", "2", "--x", "2"], -1.0),
        (["--kind", "laguerre", "--n", "1", "--x", "2"], -math.exp(-1.0)),
        (["--kind", "hermite", "--n", "0,0", "--x", "0,0"], math.pi ** -0.5),
        (["--kind", "laguerre-poly", "--n", "1", "--x", "1", "--gamma", "-0.5"], -0.5),
    ],
)
def test_basis_eval(args, expected, capsys):
    main(["basis-eval"] + args)

    assert float(capsys.readouterr().out) == pytest.approx(expected, abs=1e-14)


def test_classify(tmp_path, capsys):
    c = CoefficientArray.from_degrees(LAGUERRE, 64, lambda s: math.exp(-s))
    coeffs = write(c, tmp_path / "c.json")

    main(["classify", "--coeffs", coeffs, "--target", "roumieu:0.5"])
    summary, report = capsys.readouterr().out.split("\n", 1)
    assert summary.startswith("roumieu:0.5: yes (witness h = 1)")
    assert json.loads(report)["member"] == "yes"

    main(["classify", "--coeffs", coeffs, "--target", "flat-r:1"])
    assert capsys.readouterr().out.startswith("flat-r:1: no")

    run(["classify", "--coeffs", coeffs, "--target", "gevrey:1"], 2)


@pytest.mark.parametrize("n", [0, 2, 3])
def test_expanded_basis_function_is_finite(tmp_path, capsys, n):
    coeffs = str(tmp_path / "c.json")
    main(["expand", "--fn", f"l:{n}", "--caps", str(n), "--out", coeffs])
    capsys.readouterr()

    main(["classify", "--coeffs", coeffs, "--target", "finite"])
    assert capsys.readouterr().out.startswith("finite: yes")

    main(["operator", "--coeffs", coeffs, "--eta", "1,1"])
    result = json.loads(capsys.readouterr().out)
    assert result["finite"] is True
    assert result["value"] == pytest.approx(max(1.0, n ** n / math.factorial(n)))


def test_classify_xml_report(tmp_path):
    c = CoefficientArray.delta(LAGUERRE, 10, 3)
    coeffs = write(c, tmp_path / "c.json")
    out = tmp_path / "decision.xml"

    main(
        [
            "classify", "--coeffs", coeffs, "--target", "finite",
            "-t", "XML", "-p", "--out", str(out),
        ]
    )

    assert out.read_bytes().startswith(b"<?xml")
    root = etree.parse(str(out)).getroot()
    assert root.tag == "decision"
    assert root.findtext("member") == "yes"

    run(["classify", "--coeffs", coeffs, "--target", "finite", "--out", str(out)], 2)


def test_transform(tmp_path, capsys):
    coeffs = write(CoefficientArray.delta(LAGUERRE, 4, 0), tmp_path / "a.json")
    out = tmp_path / "b.json"

    main(["transform", "--coeffs", coeffs, "--direction", "luh", "--out", str(out)])

    b = CoefficientArray.load(out)
    assert b.basis == HERMITE
    assert b.caps == (8,)
    assert b[0] == pytest.approx(math.pi ** 0.25, rel=1e-14)
    assert "truncated: 0" in capsys.readouterr().out


def test_transform_round_trip(tmp_path):
    a = CoefficientArray.delta(LAGUERRE, 5, 1)
    coeffs = write(a, tmp_path / "a.json")
    middle = tmp_path / "b.json"
    back = tmp_path / "c.json"

    main(["transform", "--coeffs", coeffs, "--direction", "luh", "--out", str(middle)])
    main(
        ["transform", "--coeffs", str(middle), "--direction", "hul", "--out", str(back)]
    )

    np.testing.assert_allclose(CoefficientArray.load(back).values, a.values, atol=1e-12)


def test_transform_diagnostics(tmp_path):
    odd = CoefficientArray(HERMITE, np.array([1.0, 0.5, 0.0, 0.0, 0.0]))
    coeffs = write(odd, tmp_path / "b.json")
    out = tmp_path / "a.json"

    run(["transform", "--coeffs", coeffs, "--direction", "hul", "--out", str(out)], 3)
    assert not out.exists()

    run(
        [
            "transform", "--coeffs", coeffs, "--direction", "hul",
            "--k-tail", "4", "--out", str(out),
        ],
        2,
    )


def test_operator(tmp_path, capsys):
    coeffs = write(CoefficientArray.delta(LAGUERRE, 5, 3), tmp_path / "c.json")
    out = tmp_path / "e.json"

    main(["operator", "--coeffs", coeffs, "--power", "2", "--out", str(out)])
    assert CoefficientArray.load(out)[3] == 9.0

    delta0 = write(CoefficientArray.delta(LAGUERRE, 4, 0), tmp_path / "d.json")
    capsys.readouterr()
    main(["operator", "--coeffs", delta0, "--eta", "1,1"])
    result = json.loads(capsys.readouterr().out)
    assert result["value"] == pytest.approx(1.0)
    assert result["finite"] is True

    main(["operator", "--coeffs", delta0, "--eta", "1,1", "--lp", "1"])
    assert json.loads(capsys.readouterr().out)["value"] == pytest.approx(2.0, rel=1e-6)


def test_operator_hermite(tmp_path):
    coeffs = write(CoefficientArray.delta(HERMITE, 4, 2), tmp_path / "c.json")
    out = tmp_path / "h.json"

    main(["operator", "--coeffs", coeffs, "--op", "H", "--out", str(out)])
    assert CoefficientArray.load(out)[2] == 5.0


@pytest.mark.parametrize(
    "flags",
    [
        [],
        ["--op", "H", "--eta", "1,1"],
        ["--eta", "1"],
        ["--eta", "1,0"],
        ["--lp", "2"],
        ["--eta", "1,1", "--lp", "0.5"],
        ["--eta", "1,1", "--quad-order", "50"],
        ["--power", "-1", "--eta", "1,1"],
    ],
)
def test_operator_flag_errors(tmp_path, flags):
    coeffs = write(CoefficientArray.delta(LAGUERRE, 4, 0), tmp_path / "c.json")

    run(["operator", "--coeffs", coeffs] + flags, 2)


def test_verify_report(tmp_path, capsys):
    report = tmp_path / "report.csv"

    main(["verify", "--suite", "transform", "--jobs", "2", "--report", str(report)])

    lines = report.read_text().splitlines()
    assert lines[0] == "suite,invariant_id,paper_anchor,measured,threshold,pass"
    assert all(line.startswith("transform,") for line in lines[1:])
    assert all(line.endswith(",pass") for line in lines[1:])
    assert f"{len(lines) - 1}/{len(lines) - 1} checks passed" in capsys.readouterr().err

    run(["verify", "--suite", "transform", "--report", str(report)], 2)
    run(["verify", "--jobs", "0"], 2)


def test_demo_flat(tmp_path, capsys):
    out = tmp_path / "demo.json"

    main(["demo-flat", "--out", str(out)])

    printed = capsys.readouterr().out
    assert "monotone: True" in printed
    assert "strict_witness: True" in printed
    data = json.loads(out.read_text())
    assert data["monotone"] is True
    assert data["columns"][0] == "roumieu:0.25"

    run(["demo-flat", "--caps", "5"], 2)
