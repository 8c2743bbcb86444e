import json
import os
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from xitaylor.cli import _parse_complex, main, render_svg


def run(args, env=None, cwd=None):
    e = dict(os.environ)
    e.update(env or {})
    p = subprocess.run([sys.executable, "-m", "xitaylor", *args], capture_output=True, env=e, cwd=cwd)
    return p.returncode, p.stdout, p.stderr


def err_json(stderr: bytes):
    return json.loads(stderr.decode().strip().splitlines()[-1])


@pytest.fixture
def cache(tmp_path):
    return {"XITAYLOR_CACHE": str(tmp_path / "cache")}


def test_usage_errors(capsys):
    assert main([]) == 1
    assert err_json(capsys.readouterr().err.encode())["exit_code"] == 1
    assert main(["lambda"]) == 1
    assert main(["lambda", "--n", "52", "--digits", "5"]) == 1
    assert main(["zeros", "--n", "26", "--delta", "0.9"]) == 1
    assert main(["plot"]) == 1
    assert main(["plot", "--roots", "/nonexistent.csv"]) == 1
    assert main(["sweep", "--kind", "lambda", "--n-list", "16,x"]) == 1
    assert main(["bogus"]) == 1


def test_numerical_and_precision_exit_codes(capsys):
    assert main(["lambda", "--n", "4"]) == 2
    e = err_json(capsys.readouterr().err.encode())
    assert e["error"] == "BracketError" and e["exit_code"] == 2
    assert main(["table1", "--digits", "100"]) == 3
    assert err_json(capsys.readouterr().err.encode())["error"] == "PrecisionError"


def test_lambda_output_and_env_precedence(cache):
    rc, out, _ = run(["lambda", "--n", "52"], env={"XITAYLOR_DIGITS": "20", **cache})
    assert rc == 0 and json.loads(out)["digits"] == 20
    rc, out, _ = run(["lambda", "--n", "52", "--digits", "25"], env={"XITAYLOR_DIGITS": "20", **cache})
    assert json.loads(out)["digits"] == 25
    rc, _, err = run(["lambda", "--n", "52"], env={"XITAYLOR_DIGITS": "lots", **cache})
    assert rc == 1 and err_json(err)["error"] == "usage"


def test_lambda_deterministic(cache):
    a = run(["lambda", "--n", "52"], env=cache)[1]
    b = run(["lambda", "--n", "52"], env=cache)[1]
    assert a == b and json.loads(a)["lambda"].startswith("80.2728091050025")


def test_coeffs_independent_of_workers(tmp_path):
    outs = []
    for w in (1, 3):
        c = tmp_path / f"c{w}"
        rc, out, _ = run(["coeffs", "--degree", "40", "--workers", str(w), "--cache", str(c)])
        assert rc == 0
        outs.append(out)
    assert outs[0] == outs[1]


def test_zeros_outputs_atomic_and_deterministic(tmp_path, cache):
    blobs = []
    for w, d in ((1, "a"), (1, "b"), (3, "c")):
        rc, out, _ = run(["zeros", "--n", "26", "--workers", str(w), "--out-dir", str(tmp_path / d)], env=cache)
        assert rc == 0 and json.loads(out)["roots"] == 50
        files = sorted(os.listdir(tmp_path / d))
        # nothing but the two results; no temporaries left behind
        assert files == ["count_n26.json", "roots_n26.csv"]
        blobs.append(tuple((tmp_path / d / f).read_bytes() for f in files))
    assert blobs[0] == blobs[1] == blobs[2]
    rep = json.loads(blobs[0][0])
    assert rep["kminus"] >= 0 and 2 * rep["z_outside_measured"] + rep["strip_count_measured"] == 50


def test_curve_and_plot(tmp_path, cache):
    cfile = tmp_path / "d1.csv"
    rc, _, _ = run(["curve", "--kind", "exp-D1", "--n", "32", "--samples", "20", "--out", str(cfile)], env=cache)
    assert rc == 0
    assert cfile.read_text().splitlines()[1].startswith("exp-D1,32,")
    rfile = tmp_path / "roots.csv"
    rfile.write_text("re,im,class,residual,match_index\n0.5,0.3,spurious,1e-30,\n0,0.1,hurwitz,1e-30,1\n")
    svgs = []
    for k in range(2):
        out = tmp_path / f"p{k}.svg"
        rc, _, _ = run(["plot", "--roots", str(rfile), "--curves", str(cfile), "--out", str(out)], env=cache)
        assert rc == 0
        svgs.append(out.read_bytes())
    assert svgs[0] == svgs[1]
    root = ET.fromstring(svgs[0])
    ns = "{http://www.w3.org/2000/svg}"
    assert len(root.findall(f"{ns}circle")) == 2
    assert len(root.findall(f"{ns}polyline")) == 4


def test_render_svg_pure():
    a = render_svg([(0.1, 0.2, "hurwitz")], [[(0.0, 0.3, ""), (0.5, 0.2, "")]])
    assert a == render_svg([(0.1, 0.2, "hurwitz")], [[(0.0, 0.3, ""), (0.5, 0.2, "")]])
    assert a.startswith("<svg") and "#1f77b4" in a


def test_sweep_lambda_deterministic(cache):
    a = run(["sweep", "--kind", "lambda", "--n-list", "16,32,64"], env=cache)
    b = run(["sweep", "--kind", "lambda", "--n-list", "16,32,64"], env=cache)
    assert a[0] == 0 and a[1] == b[1]
    assert a[1].decode().splitlines()[0].startswith("n,lambda,seed")


def test_lfunc_command(tmp_path, cache):
    desc = tmp_path / "beta.json"
    from xitaylor.lfunc import LFunctionDescriptor

    desc.write_text(LFunctionDescriptor.dirichlet_beta().to_json())
    rc, out, _ = run(["lfunc", "--n", "16", "--descriptor", str(desc)], env=cache)
    assert rc == 0
    d = json.loads(out)
    assert d["scaling"]["n"] == 16 and len(d["symmetry_residuals"]) == 3
    rc2, out2, _ = run(["lfunc", "--n", "16", "--preset", "beta"], env=cache)
    assert out2 == out


def test_parse_complex():
    import mpmath

    with mpmath.workdps(40):
        z = _parse_complex("0.2i")
        assert z.real == 0 and z.imag == mpmath.mpf("0.2")
        assert _parse_complex("1.02-0.05i") == mpmath.mpc("1.02", "-0.05")
        assert _parse_complex("-i") == mpmath.mpc(0, -1)
    from xitaylor.cli import UsageError

    with pytest.raises(UsageError):
        _parse_complex("1+")


def test_table1_command(cache):
    rc, out, _ = run(["table1", "--digits", "420"], env=cache)
    assert rc == 0
    lines = out.decode().splitlines()
    assert lines[0] == "k,paper_value,computed_value,ratio" and len(lines) == 25
    assert lines[1].startswith("1,6.4203e-343,6.4203")
