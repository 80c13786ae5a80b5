import io

import pytest

from ppeval.cli import EXIT_CAP, EXIT_ERROR, EXIT_NO, EXIT_OK, main
from ppeval.dsl import load_domain, load_plan
from ppeval.errors import SolverCapError
from ppeval.evaluation import eval_looping


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_eval_fig2a():
    code, out, _ = run("eval", "--plan", "fig2a.ppl")
    assert code == EXIT_OK and out.strip() == "7/16 0.437500"


@pytest.mark.parametrize("theta, want", [("7/16", EXIT_OK), ("0.44", EXIT_NO)])
def test_eval_threshold(theta, want):
    assert run("eval", "--plan", "fig2a.ppl", "--threshold", theta)[0] == want


def test_eval_extras():
    code, out, _ = run("eval", "--plan", "fig2b.ppl", "--count", "dig-moat", "--simulate", "500", "--seed", "3")
    assert code == EXIT_OK
    assert "expected dig-moat: 7/4" in out and "simulated" in out
    assert run("eval", "--plan", "fig2d.ppl", "--horizon", "2")[0] == EXIT_OK


@pytest.mark.parametrize("interp, value", [("optimistic", "43/64"), ("pessimistic", "21/32"), ("average", "85/128")])
def test_eval_interpretations(interp, value):
    code, out, _ = run("eval", "--plan", "fig2c.ppl", "--interpretation", interp)
    assert code == EXIT_OK and out.startswith(value + " ")


def test_eval_circuit_domain():
    assert run("eval", "--domain", "sandcastle-circuit.ppd", "--plan", "fig2a.ppl")[1].startswith("7/16")


@pytest.mark.parametrize("argv", [
    ("eval", "--plan", "missing.ppl"),
    ("eval", "--plan", "fig2a.ppl", "--threshold", "3/2"),
    ("eval", "--plan", "fig2a.ppl", "--threshold", "abc"),
    ("extensions", "--plan", "fig2a.ppl"),
    ("bogus",),
    ("exists", "--horizon", "2", "--threshold", "1/2", "--class", "acyclic", "--obs", "moat -> m"),
])
def test_errors_exit_2(argv):
    code, _, err = run(*argv)
    assert code == EXIT_ERROR


def test_invalid_plan_file(tmp_path):
    bad = tmp_path / "bad.ppl"
    bad.write_text("total-order: fly\n")
    code, _, err = run("eval", "--plan", str(bad))
    assert code == EXIT_ERROR and "fly" in err


def test_exists_found_and_exhausted():
    code, out, err = run("exists", "--horizon", "3", "--threshold", "1/2")
    assert code == EXIT_OK
    assert out == "# value 9/16\ntotal-order: dig-moat erect-castle erect-castle\n"
    assert "nodes expanded" in err
    code, out, _ = run("exists", "--horizon", "3", "--threshold", "3/5")
    assert code == EXIT_NO and "exhausted: max 37/64" in out


def test_exists_capped():
    code, out, _ = run("exists", "--horizon", "6", "--threshold", "1", "--node-cap", "5")
    assert code == EXIT_CAP and out.startswith("capped")


def test_exists_controllers():
    obs = ["--obs", "moat -> moat", "--obs", "true -> no-moat"]
    code, out, _ = run("exists", "--class", "looping", "--horizon", "2", "--threshold", "1", *obs)
    assert code == EXIT_OK and "looping" in out
    code, out, _ = run("exists", "--class", "acyclic", "--horizon", "4", "--threshold", "1", *obs)
    assert code == EXIT_NO


def test_generated_tm_instance(tmp_path):
    code, _, _ = run("gen", "tm", "--input", "11", "--out", str(tmp_path))
    assert code == EXIT_OK
    code, out, _ = run("eval", "--domain", str(tmp_path / "tm.ppd"), "--plan", str(tmp_path / "tm.ppl"))
    assert code == EXIT_OK and out.startswith("1/1 ")
    with pytest.raises(SolverCapError):
        eval_looping(load_domain(tmp_path / "tm.ppd"), load_plan(tmp_path / "tm.ppl"), cap=2)


def test_validate():
    code, out, _ = run("validate", "--plan", "fig2b.ppl")
    assert code == EXIT_OK and "domain sandcastle" in out


def test_extensions():
    code, out, _ = run("extensions", "--plan", "fig2c.ppl")
    assert code == EXIT_OK
    assert out.splitlines() == ["dig-moat dig-moat dig-moat erect-castle erect-castle",
                                "dig-moat dig-moat erect-castle dig-moat erect-castle"]


def test_gen_majsat(tmp_path):
    code, out, _ = run("gen", "majsat", "--out", str(tmp_path), "--stem", "demo")
    assert code == EXIT_OK
    code, out, _ = run("eval", "--domain", str(tmp_path / "demo.ppd"), "--plan", str(tmp_path / "demo.ppl"),
                       "--threshold", "1/2")
    assert code == EXIT_OK and out.startswith("1/2 ")


def test_convert(tmp_path):
    code, out, _ = run("convert", "--out", str(tmp_path), "--stem", "c")
    assert code == EXIT_OK
    code, out, _ = run("eval", "--domain", str(tmp_path / "c.ppd"), "--plan", "fig2b.ppl")
    assert out.startswith("15/32 ")
    assert run("convert", "--domain", "sandcastle-circuit.ppd", "--out", str(tmp_path))[0] == EXIT_ERROR


def test_deterministic_output(tmp_path):
    for argv in [("eval", "--plan", "fig2c.ppl", "--simulate", "300", "--seed", "9"),
                 ("exists", "--class", "acyclic", "--horizon", "3", "--threshold", "2/5")]:
        assert run(*argv) == run(*argv)
    a, b = tmp_path / "a", tmp_path / "b"
    run("gen", "majsat", "--out", str(a))
    run("gen", "majsat", "--out", str(b))
    for f in sorted(a.iterdir()):
        assert f.read_bytes() == (b / f.name).read_bytes()
