"""CLI behavior: report schemas, exit codes, determinism, and fuzz robustness.

Everything runs in-process through cli.main so exit codes and stdout bytes
are observable directly.
"""

import io
import json
import math
from contextlib import redirect_stdout

import numpy as np
import pytest

from cdfun import cli
from cdfun.algebra import CDNumber, basis_element, mul
from cdfun.expressions import parse, phrase_to_json


def invoke(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.main(list(argv))
    return code, buf.getvalue()


def invoke_json(argv):
    code, out = invoke(argv)
    return code, json.loads(out)


def circle_json(center, radius, direction, turns=1):
    return {"kind": "circle", "center": center, "radius": radius,
            "direction": direction, "turns": turns}


@pytest.fixture
def circle3(tmp_path):
    path = tmp_path / "circle3.json"
    path.write_text(json.dumps(circle_json([0] * 8, 1.0, [0, 1] + [0] * 6)))
    return str(path)


# ---------------------------------------------------------------------------
# worked examples
# ---------------------------------------------------------------------------

def test_eval_basis_product():
    code, rep = invoke_json(["eval", "--level", "2", "--expr", "e1*e2"])
    assert code == 0
    assert rep["value"] == [0.0, 0.0, 0.0, 1.0]


def test_integrate_reciprocal_unit_circle(circle3):
    code, rep = invoke_json(["integrate", "--level", "3", "--expr", "z^-1",
                             "--path-file", circle3])
    assert code == 0
    assert rep["converged"] is True
    value = np.array(rep["value"])
    assert abs(value[1] - 2.0 * math.pi) <= 1e-5
    assert np.max(np.abs(np.delete(value, 1))) <= 1e-5


def test_zerodiv_division_algebra():
    code, rep = invoke_json(["zerodiv", "--level", "3"])
    assert code == 0
    assert rep == {"found": False}


def test_zerodiv_sedenions():
    code, rep = invoke_json(["zerodiv", "--level", "4"])
    assert code == 0
    assert rep["found"] is True
    assert rep["product_norm"] == 0.0
    x = np.array(rep["x"])
    y = np.array(rep["y"])
    assert abs(np.linalg.norm(x) * np.linalg.norm(y) - 2.0) <= 1e-12


# ---------------------------------------------------------------------------
# exit codes and error JSON
# ---------------------------------------------------------------------------

def test_level_cap_is_usage_error():
    code, rep = invoke_json(["eval", "--level", "9", "--expr", "z"])
    assert code == 1
    assert rep["error"]["kind"] == "usage"


def test_missing_level_is_usage_error():
    code, rep = invoke_json(["eval", "--expr", "z"])
    assert code == 1
    assert rep["error"]["kind"] == "usage"


def test_expression_syntax_error_exits_1():
    code, rep = invoke_json(["eval", "--level", "2", "--expr", "z +* 2"])
    assert code == 1
    assert rep["error"]["kind"] == "parse"


def test_pole_hit_exits_2():
    code, rep = invoke_json(["eval", "--level", "2", "--expr", "z^-1",
                             "--point", "[0, 0, 0, 0]"])
    assert code == 2
    assert rep["error"]["kind"] == "pole"


def test_nonconvergence_exits_2():
    # |z|^2 + 1 has no zeros anywhere
    code, rep = invoke_json(["roots", "--level", "1", "--expr", "z*zc + (1.0)"])
    assert code == 2
    assert rep["error"]["kind"] == "nonconvergence"


def test_unknown_subcommand_is_usage_error():
    code, rep = invoke_json(["transmogrify", "--level", "2"])
    assert code == 1
    assert rep["error"]["kind"] == "usage"


def test_no_subcommand_is_usage_error():
    code, rep = invoke_json([])
    assert code == 1
    assert rep["error"]["kind"] == "usage"


def test_bad_path_kind_is_usage_error(tmp_path):
    bad = tmp_path / "path.json"
    bad.write_text(json.dumps({"kind": "sphere", "center": [0, 0, 0, 0]}))
    code, rep = invoke_json(["integrate", "--level", "2", "--expr", "z",
                             "--path-file", str(bad)])
    assert code == 1
    assert rep["error"]["kind"] == "usage"


def test_wrong_point_width_is_usage_error():
    code, rep = invoke_json(["eval", "--level", "3", "--expr", "z",
                             "--point", "[1, 0]"])
    assert code == 1
    assert "8 coordinates" in rep["error"]["detail"]


# ---------------------------------------------------------------------------
# determinism
# ---------------------------------------------------------------------------

def test_reports_are_byte_identical(circle3):
    jobs = [
        ["eval", "--level", "2", "--expr", "e1*e2"],
        ["roots", "--level", "2", "--expr", "z^2 + (1.0)", "--seed", "7"],
        ["integrate", "--level", "3", "--expr", "z^-1", "--path-file", circle3],
        ["crcheck", "--level", "2", "--expr", "zc", "--point", "[0.3, 0.1, -0.2, 0.5]"],
    ]
    first = [invoke(argv) for argv in jobs]
    second = [invoke(argv) for argv in jobs]
    assert first == second


def test_roots_seed_changes_start_but_stays_valid():
    f = ["roots", "--level", "2", "--expr", "z^2 + (1.0)"]
    code_a, rep_a = invoke_json(f + ["--seed", "1"])
    code_b, rep_b = invoke_json(f + ["--seed", "2"])
    assert code_a == 0 and code_b == 0
    for rep in (rep_a, rep_b):
        assert rep["residual"] <= 1e-6
        root = np.array(rep["root"])
        # any root of z^2 + 1 is a unit imaginary
        assert abs(root[0]) <= 1e-6
        assert abs(np.linalg.norm(root) - 1.0) <= 1e-6


# ---------------------------------------------------------------------------
# input plumbing: job files, expr files, output files
# ---------------------------------------------------------------------------

def test_job_file_matches_flag_route(tmp_path, circle3):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({
        "command": "integrate", "level": 3, "expression": "z^-1",
        "path": circle_json([0] * 8, 1.0, [0, 1] + [0] * 6),
    }))
    code_a, out_a = invoke(["job", str(job)])
    code_b, out_b = invoke(["integrate", "--level", "3", "--expr", "z^-1",
                            "--path-file", circle3])
    assert code_a == code_b == 0
    assert out_a == out_b


def test_job_rejects_unknown_fields(tmp_path):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"command": "eval", "level": 2, "expr": "z", "extra": 1}))
    code, rep = invoke_json(["job", str(job)])
    assert code == 1
    assert "unknown job fields" in rep["error"]["detail"]


def test_job_rejects_selftest_command(tmp_path):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"command": "selftest"}))
    code, rep = invoke_json(["job", str(job)])
    assert code == 1


def test_expr_file_accepts_json_tree(tmp_path):
    f = parse("z^2 + e1", 2)
    tree = tmp_path / "expr.json"
    tree.write_text(json.dumps(phrase_to_json(f)))
    point = "[0.4, -0.3, 0.2, 0.1]"
    code_a, out_a = invoke(["eval", "--level", "2", "--expr-file", str(tree),
                            "--point", point])
    code_b, out_b = invoke(["eval", "--level", "2", "--expr", "z^2 + e1",
                            "--point", point])
    assert code_a == code_b == 0
    assert out_a == out_b


def test_output_flag_writes_file(tmp_path):
    out_file = tmp_path / "report.json"
    code, out = invoke(["eval", "--level", "2", "--expr", "e1*e2",
                        "--output", str(out_file)])
    assert code == 0
    assert out == ""
    assert json.loads(out_file.read_text())["value"] == [0.0, 0.0, 0.0, 1.0]


# ---------------------------------------------------------------------------
# per-command output shapes
# ---------------------------------------------------------------------------

def test_diff_command_matches_algebra():
    z0 = CDNumber(2, [0.3, -0.2, 0.5, 0.1])
    h = CDNumber(2, [0.7, 0.4, -0.1, 0.2])
    code, rep = invoke_json([
        "diff", "--level", "2", "--expr", "z^2",
        "--point", json.dumps(list(z0.coeffs)),
        "--direction", json.dumps(list(h.coeffs)),
    ])
    assert code == 0
    want = mul(z0, h) + mul(h, z0)
    assert np.max(np.abs(np.array(rep["value"]) - want.coeffs)) <= 1e-12


def test_logint_and_index_unit_circle(tmp_path):
    path = tmp_path / "circle2.json"
    path.write_text(json.dumps(circle_json([0, 0, 0, 0], 1.0, [0, 1, 0, 0], 2)))
    code, rep = invoke_json(["logint", "--level", "2", "--path-file", str(path)])
    assert code == 0
    want = np.array([0.0, 4.0 * math.pi, 0.0, 0.0])
    assert np.max(np.abs(np.array(rep["value"]) - want)) <= 1e-9

    code, rep = invoke_json(["index", "--level", "2", "--path-file", str(path)])
    assert code == 0
    assert np.max(np.abs(np.array(rep["ar_index"]) - [0, 2, 0, 0])) <= 1e-6
    assert rep["winding"]["e1"] == 2


def test_residue_command():
    code, rep = invoke_json([
        "residue", "--level", "2", "--expr", "z^-1",
        "--pole", "[0, 0, 0, 0]", "--direction", "[0, 0, 1, 0]", "--rho", "0.5",
    ])
    assert code == 0
    assert np.max(np.abs(np.array(rep["value"]) - [0, 0, 1, 0])) <= 1e-6


def test_cauchy_command_orders(tmp_path):
    path = tmp_path / "circle.json"
    path.write_text(json.dumps(circle_json([0, 0, 0, 0], 1.5, [0, 1, 0, 0])))
    z = CDNumber(2, [0.3, 0.2, 0.0, 0.0])  # in the plane of the circle
    m = basis_element(2, 1)
    code, rep = invoke_json(["cauchy", "--level", "2", "--expr", "z^2",
                             "--point", json.dumps(list(z.coeffs)),
                             "--path-file", str(path)])
    assert code == 0
    want = mul(mul(z, z), m)
    assert np.max(np.abs(np.array(rep["value"]) - want.coeffs)) <= 1e-5

    code, rep = invoke_json(["cauchy", "--level", "2", "--expr", "z^2",
                             "--point", json.dumps(list(z.coeffs)),
                             "--order", "1", "--path-file", str(path)])
    assert code == 0
    want = mul(z, m) * 2.0
    assert np.max(np.abs(np.array(rep["value"]) - want.coeffs)) <= 1e-4


def test_taylor_command(tmp_path):
    center = [0.2, 0.0, 0.0, 0.0]
    path = tmp_path / "circle.json"
    path.write_text(json.dumps(circle_json(center, 1.0, [0, 1, 0, 0])))
    code, rep = invoke_json(["taylor", "--level", "2", "--expr", "z^2",
                             "--center", json.dumps(center), "--count", "3",
                             "--path-file", str(path)])
    assert code == 0
    got = np.array(rep["coefficients"])
    want = np.zeros((3, 4))
    want[:, 0] = [0.04, 0.4, 1.0]  # (w + 0.2)^2 about the center
    assert np.max(np.abs(got - want)) <= 1e-6


def test_laurent_command():
    code, rep = invoke_json(["laurent", "--level", "2", "--expr", "z^-1",
                             "--center", "[0, 0, 0, 0]",
                             "--kmin", "-2", "--kmax", "1"])
    assert code == 0
    assert rep["k_min"] == -2
    got = np.array(rep["coefficients"])
    want = np.zeros((4, 4))
    want[1, 0] = 1.0  # the k = -1 coefficient
    assert np.max(np.abs(got - want)) <= 1e-6


def test_restheorem_command_via_job(tmp_path):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({
        "command": "restheorem", "level": 2, "expression": "z^-1",
        "poles": [[0, 0, 0, 0]],
        "path": circle_json([0, 0, 0, 0], 2.0, [0, 0, 1, 0]),
    }))
    code, rep = invoke_json(["job", str(job)])
    assert code == 0
    assert rep["mode"] == "value"
    assert rep["diff"] <= 1e-5
    assert abs(rep["lhs"][2] - 2.0 * math.pi) <= 1e-5


def test_argprinciple_command(tmp_path):
    path = tmp_path / "circle.json"
    path.write_text(json.dumps(circle_json([0, 0, 0, 0], 1.0, [0, 1, 0, 0])))
    code, rep = invoke_json(["argprinciple", "--level", "2", "--expr", "z^2",
                             "--zeros", "[[[0, 0, 0, 0], 2]]",
                             "--path-file", str(path)])
    assert code == 0
    assert np.max(np.abs(np.array(rep["lhs"]) - [0, 2, 0, 0])) <= 1e-4
    assert rep["diff"] <= 1e-4


def test_differentiability_commands():
    point3 = json.dumps([0.3, -0.1, 0.4, 0.2, -0.3, 0.1, 0.0, 0.5])
    code, rep = invoke_json(["crcheck", "--level", "3", "--expr", "zc",
                             "--point", point3])
    assert code == 0
    assert rep["verdict"] == "fail"
    assert set(rep) == {"max_residual", "per_pair", "verdict"}

    code, rep = invoke_json(["zbarcheck", "--level", "3", "--expr", "e2*z^3",
                             "--point", point3])
    assert code == 0
    assert rep["verdict"] == "pass"

    code, rep = invoke_json(["harmonic", "--level", "2", "--expr", "z*zc",
                             "--point", "[0.3, 0.1, -0.2, 0.5]"])
    assert code == 0
    assert rep["verdict"] == "fail"


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------

def test_selftest_reduced_all_pass():
    code, out = invoke(["selftest", "--scale", "0.05"])
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 15  # 14 criteria + the summary line
    assert all(line.startswith("[PASS]") for line in lines[:-1])
    assert "all criteria passed" in lines[-1]


def test_selftest_sign_error_hook_fails_and_restores():
    code, out = invoke(["selftest", "--scale", "0.05", "--inject-sign-error"])
    assert code == 2
    first = out.strip().splitlines()[0]
    assert first.startswith("[FAIL]") and "algebraic identities" in first
    # the corrupted table must be restored afterwards
    e1 = basis_element(2, 1)
    e2 = basis_element(2, 2)
    assert mul(e1, e2) == basis_element(2, 3)


# ---------------------------------------------------------------------------
# fuzz: malformed job specs never crash bare
# ---------------------------------------------------------------------------

def _fuzz_spec(rng: np.random.Generator):
    commands = list(cli.COMMANDS) + ["", "selftest", "EVAL", "z", None, 3]
    keys = sorted(cli._JOB_KEYS) + ["bogus", "PATH", "Command", ""]
    scalars = [None, True, False, 0, 3, -1, 9999, 0.5, -1e308, "z", "z^2",
               "e1*e2", "][", "circle", "", "NaN", [1, 2], [0, 0, 0, 0],
               [0] * 8, [], {}, {"kind": "circle"}, {"kind": "sphere"},
               {"a": {"b": [1, {}]}}, [[0, 0, 0, 0], 1], "1e-6"]

    def pick(pool):
        return pool[int(rng.integers(len(pool)))]

    variant = rng.random()
    if variant < 0.1:
        return "not json at all {{{"
    if variant < 0.2:
        return json.dumps(pick(scalars))
    spec = {}
    if rng.random() < 0.9:
        spec["command"] = pick(commands)
    for _ in range(int(rng.integers(0, 6))):
        spec[pick(keys)] = pick(scalars)
    return json.dumps(spec)


def test_fuzz_malformed_specs_never_bare_crash(tmp_path):
    rng = np.random.default_rng(20260818)
    spec_file = tmp_path / "spec.json"
    codes = {0: 0, 1: 0, 2: 0}
    for _ in range(1000):
        spec_file.write_text(_fuzz_spec(rng))
        code, out = invoke(["job", str(spec_file)])
        assert code in (0, 1, 2)
        codes[code] += 1
        rep = json.loads(out)
        if code != 0:
            assert set(rep["error"]) == {"kind", "detail"}
    # the corpus must actually exercise the error paths
    assert codes[1] >= 900
