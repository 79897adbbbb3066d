import json
import re

import pytest
from mpmath import mp

from padelab import cli, config, svg
from padelab.errors import ConfigInvalid

BASE = {
    "surface": {"branch_points": [-1, 1]},
    "target": {"density": "exppoly(0,1)"},
    "scheme": {"kind": "classical"},
    "n_list": [2, 3],
    "precision_digits": 40,
}


def _write(tmp_path, cfg):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    return str(p)


@pytest.mark.parametrize("text,coeffs", [
    ("z^4-1", [-1, 0, 0, 0, 1]),
    ("poly(1, 2)", [1, 2]),
    ("2z^2 - 3*z + (1+2j)", [mp.mpc(1, 2), -3, 2]),
    ("z", [0, 1]),
])
def test_parse_poly(text, coeffs):
    assert list(config.parse_poly(text).coeffs) == [mp.mpc(c) for c in coeffs]


def test_parse_expression_kinds():
    assert config.parse_expression("algpow(z^4-1; -1/4)")[0] == "germ"
    assert config.parse_expression("const(2)")[0] == "density"
    for bad in ("algpow(z^3-1; -1/2)", "algpow(z^4-1; 1/2)", "foo(1)", "const(0)", "exppoly()"):
        with pytest.raises(ConfigInvalid):
            config.parse_expression(bad)


def test_presets_resolve():
    for name in config.PRESETS:
        cfg = config.resolve(preset=name)
        assert cfg["name"] == name and cfg["precision_digits"] == 64


def test_resolve_overrides_and_digits():
    cfg = config.resolve({"n_list": [30]}, "fig2a", digits=80)
    assert cfg["n_list"] == [30] and cfg["precision_digits"] == 80 and cfg["scheme"]["kind"] == "four_corner"


@pytest.mark.parametrize("mutate", [
    lambda c: c.update(extra=1),
    lambda c: c.update(n_list=[]),
    lambda c: c["surface"].update(branch_points=[-1, 1, 2]),
    lambda c: c["surface"].update(branch_points=[1, 1]),
    lambda c: c.update(target={"germ": "algpow(z^2-1; -1/2)", "density": "const(1)"}),
    lambda c: c.update(target={"germ": "exppoly(0,1)"}),
    lambda c: c.update(scheme={"kind": "spiral"}),
    lambda c: c.update(precision_digits=10),
    lambda c: c.update(stages=["asymptotics"], target={"germ": "algpow(z^2-1; -1/2)"}),
])
def test_validation_failures(mutate):
    cfg = json.loads(json.dumps(BASE))
    mutate(cfg)
    with pytest.raises(ConfigInvalid):
        config.resolve(cfg)


def test_svg_empty_and_square():
    empty = svg.render()
    assert empty.startswith("<?xml") and empty.rstrip().endswith("</svg>")
    sq = svg.render(polylines=[[0, 1, 1 + 1j, 1j, 0]])
    paths = re.findall(r'<path d="([^"]*)"', sq)
    assert len(paths) == 1 and paths[0].count("L") == 4
    assert svg.render(points=[0.5j]) == svg.render(points=[0.5j])


def test_cli_success_outputs(tmp_path):
    out = tmp_path / "out"
    cfg = dict(BASE, stages=["pade", "contour"], name="demo")
    code = cli.main(["run", _write(tmp_path, cfg), "--out", str(out)])
    assert code == 0
    names = {p.name for p in out.iterdir()}
    for need in ("report.json", "resolved_config.json", "poles_n2.csv", "poles_n3.csv",
                 "contour_demo.csv", "figure_demo_n2.svg", "figure_demo_n2.csv"):
        assert need in names
    assert (out / "poles_n3.csv").read_text().splitlines()[0] == "n,re,im,multiplicity"
    assert (out / "contour_demo.csv").read_text().splitlines()[0] == "arc_id,s,re,im"
    rep = json.loads((out / "report.json").read_text())
    assert rep["stages"]["pade"]["rows"][1]["poles"] == 3


def test_cli_deterministic(tmp_path):
    p = _write(tmp_path, BASE)
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["run", p, "--out", str(a)]) == 0
    assert cli.main(["run", p, "--out", str(b)]) == 0
    for f in a.iterdir():
        if f.name != "timing.json":
            assert f.read_bytes() == (b / f.name).read_bytes(), f.name


def test_cli_validation_exit_code(tmp_path):
    bad = dict(BASE, surface={"branch_points": [-1, 1, 2]})
    assert cli.main(["run", _write(tmp_path, bad), "--out", str(tmp_path / "o")]) == 2
    assert cli.main(["run", "--out", str(tmp_path / "o")]) == 2
    assert cli.main(["run", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["run", "--preset", "nope"]) == 2


def test_cli_numerical_exit_code(tmp_path):
    cfg = dict(BASE, stages=["contour"], contour={"v": 1})
    out = tmp_path / "o"
    assert cli.main(["run", _write(tmp_path, cfg), "--out", str(out)]) == 3
    rep = json.loads((out / "report.json").read_text())
    assert rep["error"]["stage"] == "contour"
