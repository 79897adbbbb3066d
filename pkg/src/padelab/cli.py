"""Command line driver: ``padelab run <config.json> [--digits N] [--out DIR] [--preset NAME]``.

Exit status is 0 on success, 2 when the configuration is invalid and 3
when a numerical stage fails.  Every output except ``timing.json`` is a
deterministic function of the resolved configuration.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from mpmath import mp

from . import __version__, config as cfgmod, svg
from .errors import ConfigInvalid, NumericalError, PadelabError
from .numkit import precision, tolerances, to_mpc

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


class StageError(NumericalError):
    """A numerical failure tagged with the stage that raised it."""

    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"stage {stage}: {type(exc).__name__}: {exc}")
        self.stage, self.cause = stage, exc


# ---------------------------------------------------------------------------
# small helpers
# ---------------------------------------------------------------------------

def _f(x) -> float:
    return float(mp.re(x)) if isinstance(x, (mp.mpc, complex)) else float(x)


def _pair(z) -> list:
    z = to_mpc(z)
    return [float(mp.re(z)), float(mp.im(z))]


def _num(x: float) -> str:
    return repr(float(x))


def _write(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _csv(path, header: str, rows) -> None:
    lines = [header] + [",".join(str(c) for c in row) for row in rows]
    _write(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# run context
# ---------------------------------------------------------------------------

class Run:
    """State shared by the stages of one run."""

    def __init__(self, cfg: dict, out: str):
        from .pade import Scheme
        from .surface import Surface

        self.cfg, self.out = cfg, out
        self.name = cfg["name"]
        surf = cfg["surface"]
        E = cfgmod.points(surf["branch_points"])
        cuts = [cfgmod.points(c) for c in surf["cuts"]] if "cuts" in surf else None
        self.S = Surface(E, cuts)
        kind, expr = next(iter(cfg["target"].items()))
        _, obj = cfgmod.parse_expression(expr)
        if kind == "density":
            from .germs import CauchyTransform

            self.density = obj
            self.f = CauchyTransform(self.S, obj)
        else:
            self.density, self.f = None, obj
        sch = cfg["scheme"]
        nodes = None
        if "nodes" in sch:
            nodes = ["inf" if (v is None or v == "inf") else cfgmod.parse_number(v) for v in sch["nodes"]]
        self.scheme = Scheme(sch["kind"], nodes=nodes)
        self.rows = {n: self.scheme.row(n) for n in cfg["n_list"]}
        self.pade: dict = {}
        self.contour = None

    def cut_polylines(self) -> list:
        return [[complex(v) for v in arc.vertices] for arc in self.S.cuts.arcs]

    def pade_at(self, n: int):
        from .pade import compute_pade

        if n not in self.pade:
            self.pade[n] = compute_pade(self.f, self.scheme.row(n))
        return self.pade[n]


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------

def stage_pade(run: Run) -> dict:
    from .pade import interpolation_residual, pole_report, reference_segments, stabilization

    cfg = run.cfg
    ref_cfg = cfg.get("reference", {})
    ref = [cfgmod.points(s) for s in ref_cfg["segments"]] if "segments" in ref_cfg else run.S
    threshold = float(ref_cfg.get("threshold", 0.05))
    stab = cfg.get("stabilization")
    out: dict = {"rows": []}
    for n in cfg["n_list"]:
        r = run.pade_at(n)
        rep = pole_report(r, ref, threshold)
        entry = {
            "n": n,
            "degree_q": r.q.degree,
            "poles": len(r.pole_points),
            "max_distance_to_reference": rep.hausdorff,
            "outliers": [_pair(z) for z in rep.outliers],
            "n_outliers": rep.n_outliers,
            "interpolation_residual": _f(interpolation_residual(r, run.f)),
            "solver": {k: (_f(v) if isinstance(v, (mp.mpf, mp.mpc, float)) else v)
                       for k, v in r.diagnostics.items() if isinstance(v, (int, float, bool, str, mp.mpf))},
        }
        if "max_outliers" in ref_cfg:
            entry["reference_ok"] = rep.n_outliers <= ref_cfg["max_outliers"]
        if stab:
            thr = float(stab.get("threshold", 0.05))
            st = stabilization(r, run.pade_at(stab["n_prev"]), thr)
            s = {
                "n_prev": stab["n_prev"],
                "threshold": thr,
                "hausdorff_all": st.hausdorff_all,
                "hausdorff_cluster": st.hausdorff_cluster,
                "cluster_size": len(st.cluster),
                "outliers": [_pair(z) for z in st.outliers],
                "n_outliers": st.n_outliers,
            }
            if "expected_outliers" in stab:
                s["expected_ok"] = st.n_outliers == stab["expected_outliers"]
            entry["stabilization"] = s
        out["rows"].append(entry)
        _csv(os.path.join(run.out, f"poles_n{n}.csv"), "n,re,im,multiplicity",
             [(n, _num(mp.re(p.z)), _num(mp.im(p.z)), p.multiplicity) for p in r.poles])
    out["reference_segments"] = [[list(map(float, (a.real, a.imag))), list(map(float, (b.real, b.imag)))]
                                 for a, b in reference_segments(ref)]
    return out


def stage_contour(run: Run) -> dict:
    from .surface import SurfacePoint
    from .surface.contour import trace_contour

    ccfg = run.cfg.get("contour", {})
    v = ccfg.get("v", "inf")
    vp = SurfacePoint.infinity(0) if v == "inf" else SurfacePoint(cfgmod.parse_number(v), 0)
    tc = trace_contour(run.S, vp, step=ccfg.get("step"))
    run.contour = tc
    rows = []
    for i, arc in enumerate(tc.arcs):
        for s, z in zip(arc.arclength, arc.points):
            rows.append((i, _num(s), _num(mp.re(z)), _num(mp.im(z))))
    _csv(os.path.join(run.out, f"contour_{run.name}.csv"), "arc_id,s,re,im", rows)
    segs = [(a, b) for _, _, a, b in run.S.cuts.segments]
    return {
        "v": "inf" if v == "inf" else _pair(vp.z),
        "arcs": len(tc.arcs),
        "points": sum(len(a.points) for a in tc.arcs),
        "crossings": [_pair(c) for c in tc.crossings],
        "max_level_error": max((a.max_level_error for a in tc.arcs), default=0.0),
        "distance_to_cuts": tc.distance_to(segs),
    }


def stage_symmetry(run: Run) -> dict:
    from .surface.contour import check_symmetry

    return check_symmetry(run.S, run.scheme, run.cfg["n_list"]).as_dict()


def stage_asymptotics(run: Run) -> dict:
    from .szego import build_bundle, predict_SA, sa_discrepancy_on_circle

    pc = run.cfg.get("probe_circle", {})
    center = cfgmod.parse_number(pc.get("center", 0))
    radius = pc.get("radius", 3)
    samples = pc.get("samples", 32)
    rows = []
    for n in run.cfg["n_list"]:
        r = run.pade_at(n)
        b = build_bundle(run.S, run.density, run.rows[n], n)
        entry = b.as_dict()
        entry["discrepancy_circle"] = _f(sa_discrepancy_on_circle(b, r.q, center, radius, samples))
        probes = []
        for z in cfgmod.points(run.cfg.get("probes", [])):
            p0, p1 = predict_SA(b, z)
            probes.append({"z": _pair(z), "q": _pair(r.q(z)), "predicted_q": _pair(p0),
                           "predicted_sheet1": _pair(p1)})
        entry["probes"] = probes
        rows.append(entry)
    disc = [e["discrepancy_circle"] for e in rows]
    return {"rows": rows, "circle": {"center": _pair(center), "radius": radius, "samples": samples},
            "decreasing": all(b < a for a, b in zip(disc, disc[1:]))}


STAGES = {"pade": stage_pade, "contour": stage_contour,
          "symmetry": stage_symmetry, "asymptotics": stage_asymptotics}


def _figures(run: Run) -> list:
    names = []
    contour = [[complex(z) for z in a.points] for a in run.contour.arcs] if run.contour else []
    cuts = run.cut_polylines()
    targets = [(n, run.pade[n]) for n in run.cfg["n_list"] if n in run.pade]
    if not targets and contour:
        targets = [(None, None)]
    for n, r in targets:
        stem = f"figure_{run.name}" + (f"_n{n}" if n is not None else "")
        poles = r.pole_points if r else []
        nodes = [v for v, _ in run.rows[n].finite] if n is not None else []
        svg.write(os.path.join(run.out, stem + ".svg"), polylines=cuts + contour, points=poles,
                  crosses=nodes, title=f"{run.name}" + (f", n = {n}" if n is not None else ""))
        rows = []
        for i, pl in enumerate(cuts):
            rows += [("cut", i, _num(z.real), _num(z.imag)) for z in pl]
        for i, pl in enumerate(contour):
            rows += [("contour", i, _num(z.real), _num(z.imag)) for z in pl]
        rows += [("pole", i, _num(mp.re(z)), _num(mp.im(z))) for i, z in enumerate(poles)]
        rows += [("node", i, _num(mp.re(z)), _num(mp.im(z))) for i, z in enumerate(nodes)]
        _csv(os.path.join(run.out, stem + ".csv"), "layer,id,re,im", rows)
        names.append(stem + ".svg")
    return names


def execute(cfg: dict, out: str) -> tuple[int, dict]:
    """Run all configured stages; returns ``(exit_code, report)``."""
    os.makedirs(out, exist_ok=True)
    text = cfgmod.dumps(cfg)
    _write(os.path.join(out, "resolved_config.json"), text)
    report: dict = {
        "version": __version__,
        "config_sha256": hashlib.sha256(text.encode()).hexdigest(),
        "precision_digits": cfg["precision_digits"],
        "stages": {},
    }
    timing: dict = {}
    code = EXIT_OK
    tol = {k: str(v) for k, v in cfg.get("tolerances", {}).items()}
    with precision(digits=cfg["precision_digits"]), tolerances(**tol):
        try:
            run = Run(cfg, out)
        except NumericalError as exc:
            raise ConfigInvalid(f"{type(exc).__name__}: {exc}") from exc
        except (PadelabError, ValueError) as exc:
            raise ConfigInvalid(str(exc)) from exc
        for stage in cfg["stages"]:
            t0 = time.perf_counter()
            try:
                report["stages"][stage] = STAGES[stage](run)
            except (NumericalError, ZeroDivisionError, ArithmeticError) as exc:
                err = StageError(stage, exc)
                report["error"] = {"stage": stage, "type": type(exc).__name__, "message": str(exc)}
                print(f"padelab: {err}", file=sys.stderr)
                code = EXIT_NUMERICAL
                break
            finally:
                timing[stage] = time.perf_counter() - t0
        report["figures"] = _figures(run)
    _write(os.path.join(out, "report.json"), json.dumps(report, indent=2, sort_keys=True) + "\n")
    _write(os.path.join(out, "timing.json"), json.dumps(timing, indent=2, sort_keys=True) + "\n")
    return code, report


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="padelab", description="Multipoint Padé experiments.")
    ap.add_argument("--version", action="version", version=f"padelab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a configuration")
    r.add_argument("config", nargs="?", help="JSON configuration (optional with --preset)")
    r.add_argument("--digits", type=int, help="working precision in decimal digits")
    r.add_argument("--out", default="padelab-out", help="output directory")
    r.add_argument("--preset", choices=sorted(cfgmod.PRESETS), help="built-in configuration")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK
    try:
        if args.config is None and args.preset is None:
            raise ConfigInvalid("give a configuration file or --preset")
        raw = cfgmod.load(args.config) if args.config else None
        cfg = cfgmod.resolve(raw, args.preset, args.digits)
        code, _ = execute(cfg, args.out)
    except ConfigInvalid as exc:
        print(f"padelab: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"padelab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
