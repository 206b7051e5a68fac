import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from tauward import cli
from tauward.contour import ExteriorMap, sample

SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def files(tmp_path):
    disk = tmp_path / "disk.json"
    disk.write_text('{"r": 1, "b0": [0, 0], "coeffs": []}')
    ell = tmp_path / "ell.json"
    ell.write_text('{"r": 1, "b0": [0, 0], "coeffs": [[0.3, 0]]}')
    bad = tmp_path / "bad.json"
    bad.write_text('{"r": -1}')
    mom = tmp_path / "mom.json"
    mom.write_text('{"t0": 0.91, "t": [[0, 0], [0.15, 0]]}')
    th = tmp_path / "theta.json"
    th.write_text(json.dumps(cli.DEFAULT_THETA))
    return {"disk": str(disk), "ell": str(ell), "bad": str(bad), "mom": str(mom), "theta": str(th), "dir": tmp_path}


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_tau_disk(capsys, files):
    code, out, _ = run(capsys, "tau", files["disk"])
    assert code == 0
    assert json.loads(out)["result"]["log_tau"] == pytest.approx(-0.75, abs=1e-12)


def test_info_disk(capsys, files):
    code, out, _ = run(capsys, "info", files["disk"])
    r = json.loads(out)["result"]
    assert code == 0 and r["area"] == pytest.approx(np.pi) and r["t0"] == pytest.approx(1.0)
    assert r["b_minus1"] == 1.0


def test_report_embeds_config(capsys, files):
    _, out, _ = run(capsys, "info", files["ell"], "--samples", "256")
    rep = json.loads(out)
    assert rep["config"]["samples"] == 256 and rep["config"]["command"] == "info"
    assert list(rep) == ["command", "config", "result", "checks", "summary"]


@pytest.mark.parametrize("argv,needle", [
    (["tau", "--samples", "100"], "power of two"),
    (["tau", "--rho", "5"], "1 < rho <= 4"),
    (["tau", "--tol", "0"], "positive"),
    (["tau"], "needs a contour"),
])
def test_input_errors(capsys, files, argv, needle):
    argv = argv[:1] + [files["ell"]] * (len(argv) > 1) + argv[1:]
    code, _, err = run(capsys, *argv)
    assert code == 2 and needle in err


def test_bad_map_exit_2(capsys, files):
    code, _, err = run(capsys, "tau", files["bad"])
    assert code == 2 and "r > 0" in err


def test_missing_file(capsys, files):
    code, _, err = run(capsys, "tau", str(files["dir"] / "nope.json"))
    assert code == 2


def test_non_univalent_exit_2(capsys, tmp_path):
    p = tmp_path / "m.json"
    p.write_text('{"r": 1, "coeffs": [[2, 0]]}')
    code, _, err = run(capsys, "tau", str(p))
    assert code == 2 and "winding" in err


def test_failed_check_exit_1(capsys, files):
    # a huge FD step breaks the first-order identity: exit 1 with the residual table on stderr
    code, out, err = run(capsys, "ward1", files["ell"], "--order", "1", "--fd-step", "0.2")
    assert code == 1 and "dlogtau/dt0 = v0" in err
    assert not json.loads(out)["summary"]["pass"]
    # an unreachable Newton tolerance surfaces as a failed verification too
    code, _, err = run(capsys, "invert-moments", files["mom"], "--tol", "1e-30")
    assert code == 1 and "NonConvergence" in err


def test_csv(capsys, files):
    code, out, _ = run(capsys, "moments", files["ell"], "--format", "csv", "--samples", "1024")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "name,residual,tolerance,pass"
    code, out, _ = run(capsys, "info", files["ell"], "--format", "csv")
    assert out.splitlines()[0] == "key,value" and any(l.startswith("area,") for l in out.splitlines())


def test_invert_moments(capsys, files):
    code, out, _ = run(capsys, "invert-moments", files["mom"])
    m = json.loads(out)["result"]["map"]
    assert code == 0 and m["r"] == pytest.approx(1.0, abs=1e-8)
    assert m["coeffs"][0][0] == pytest.approx(0.3, abs=1e-8)


@pytest.mark.parametrize("cmd", ["theta", "zinst"])
def test_theta_commands(capsys, files, cmd):
    code, out, _ = run(capsys, cmd, files["theta"])
    assert code == 0 and json.loads(out)["summary"]["pass"]


def test_fay_torus(capsys):
    code, out, _ = run(capsys, "fay-torus", "--tau", "2j")
    assert code == 0 and json.loads(out)["result"]["residual"] < 1e-5


def test_identities_needs_z(capsys, files):
    code, _, err = run(capsys, "identities", files["ell"])
    assert code == 2 and "--z" in err


def test_svg_circle(tmp_path):
    p = tmp_path / "c.svg"
    cli.emit_svg(sample(ExteriorMap(1.0), 128), p)
    root = ET.parse(p).getroot()
    paths = root.findall(f"{SVG}path")
    assert len(paths) == 1
    assert paths[0].get("d").count("L") == 127


def test_svg_ellipse_aspect(tmp_path):
    p = tmp_path / "e.svg"
    cli.emit_svg(sample(ExteriorMap(1.0, 0, (0.3,)), 1024), p)
    root = ET.parse(p).getroot()
    d = root.find(f"{SVG}path").get("d")
    pts = np.array([list(map(float, s.split())) for s in d[2:-2].split(" L ")])
    w, h = np.ptp(pts[:, 0]), np.ptp(pts[:, 1])
    assert w / h == pytest.approx(1.3 / 0.7, rel=1e-4)
    vb = list(map(float, root.get("viewBox").split()))
    assert vb[2] == pytest.approx(1.2 * w, rel=1e-4)


def test_svg_minimal(tmp_path, capsys, files):
    p = tmp_path / "m.svg"
    code, _, _ = run(capsys, "info", files["ell"], "--samples", "64", "--svg", str(p))
    assert code == 0
    ET.parse(p)
