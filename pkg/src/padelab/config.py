"""Run configuration: JSON schema, expression grammar and built-in presets.

A configuration is a JSON object; see :data:`SCHEMA`.  Points are given
as numbers, ``[re, im]`` pairs or strings such as ``"1+2j"``.

The target is either an algebraic germ or the Cauchy transform of a
density on the cuts, written in a small expression language::

    const(c)              constant density
    poly(c0, c1, ...)     polynomial density
    exppoly(c0, c1, ...)  exp of a polynomial
    algpow(P; -1/k)       germ P(z)^(-1/k), P as poly(...) or in z, e.g. z^4-1
"""

from __future__ import annotations

import copy
import json
import re
from typing import Any

import jsonschema
from mpmath import mp

from .errors import ConfigInvalid
from .numkit import Poly, to_mpc

_POINT = {
    "oneOf": [
        {"type": "number"},
        {"type": "string"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}

SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["surface", "target", "scheme", "n_list"],
    "properties": {
        "name": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
        "precision_digits": {"type": "integer", "minimum": 39, "maximum": 2000},
        "surface": {
            "type": "object",
            "additionalProperties": False,
            "required": ["branch_points"],
            "properties": {
                "branch_points": {"type": "array", "items": _POINT, "minItems": 2},
                "cuts": {"type": "array", "items": {"type": "array", "items": _POINT, "minItems": 2}},
            },
        },
        "target": {
            "type": "object",
            "additionalProperties": False,
            "minProperties": 1,
            "maxProperties": 1,
            "properties": {"germ": {"type": "string"}, "density": {"type": "string"}},
        },
        "scheme": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"type": "string"},
                "nodes": {"type": "array", "items": {"oneOf": [_POINT, {"type": "null"}]}},
            },
        },
        "n_list": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "stages": {
            "type": "array",
            "items": {"enum": ["pade", "contour", "symmetry", "asymptotics"]},
            "minItems": 1,
            "uniqueItems": True,
        },
        "probes": {"type": "array", "items": _POINT},
        "probe_circle": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "center": _POINT,
                "radius": {"type": "number", "exclusiveMinimum": 0},
                "samples": {"type": "integer", "minimum": 4},
            },
        },
        "reference": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "segments": {"type": "array", "items": {"type": "array", "items": _POINT, "minItems": 1}},
                "threshold": {"type": "number", "exclusiveMinimum": 0},
                "max_outliers": {"type": "integer", "minimum": 0},
            },
        },
        "stabilization": {
            "type": "object",
            "additionalProperties": False,
            "required": ["n_prev"],
            "properties": {
                "n_prev": {"type": "integer", "minimum": 1},
                "threshold": {"type": "number", "exclusiveMinimum": 0},
                "expected_outliers": {"type": "integer", "minimum": 0},
            },
        },
        "contour": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"v": {"oneOf": [_POINT, {"const": "inf"}]}, "step": {"type": "number"}},
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "quad_tol": {"type": "number", "exclusiveMinimum": 0},
                "jip_tol": {"type": "number", "exclusiveMinimum": 0},
                "trace_tol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "seed": {"type": "integer"},
    },
}

DEFAULTS: dict = {
    "name": "run",
    "precision_digits": 64,
    "stages": ["pade"],
    "probes": [],
    "tolerances": {},
    "seed": 0,
}

_CROSS = {"branch_points": [-1, 1, "-1j", "1j"]}
_CROSS_REF = {"segments": [[-1, 1], ["-1j", "1j"]], "threshold": 0.05}

PRESETS: dict = {
    "fig2a": {
        "name": "fig2a", "surface": _CROSS, "target": {"germ": "algpow(z^4-1; -1/2)"},
        "scheme": {"kind": "four_corner"}, "n_list": [34], "stages": ["pade", "contour"],
        "reference": dict(_CROSS_REF, max_outliers=1),
    },
    "fig2b": {
        "name": "fig2b", "surface": _CROSS, "target": {"germ": "algpow(z^4-1; -1/2)"},
        "scheme": {"kind": "shifted_corner"}, "n_list": [60], "stages": ["pade"],
        "reference": _CROSS_REF, "stabilization": {"n_prev": 58, "threshold": 0.05},
    },
    "fig2c": {
        "name": "fig2c", "surface": _CROSS, "target": {"germ": "algpow(z^4-1; -1/2)"},
        "scheme": {"kind": "two_corner"}, "n_list": [34], "stages": ["pade"],
        "reference": _CROSS_REF, "stabilization": {"n_prev": 32, "threshold": 0.05},
    },
    "fig4a": {
        "name": "fig4a", "surface": _CROSS, "target": {"germ": "algpow(z^4-1; -1/4)"},
        "scheme": {"kind": "four_corner"}, "n_list": [36], "stages": ["pade", "contour"],
        "reference": dict(_CROSS_REF, max_outliers=2),
    },
    "fig4b": {
        "name": "fig4b", "surface": _CROSS, "target": {"germ": "algpow(z^4-1; -1/4)"},
        "scheme": {"kind": "shifted_corner"}, "n_list": [60], "stages": ["pade"],
        "reference": _CROSS_REF, "stabilization": {"n_prev": 58, "threshold": 0.05},
    },
    "fig4c": {
        "name": "fig4c", "surface": _CROSS, "target": {"germ": "algpow(z^4-1; -1/4)"},
        "scheme": {"kind": "two_corner"}, "n_list": [34], "stages": ["pade"],
        "reference": _CROSS_REF,
        "stabilization": {"n_prev": 32, "threshold": 0.05, "expected_outliers": 2},
    },
}


# ---------------------------------------------------------------------------
# expressions
# ---------------------------------------------------------------------------

_CALL = re.compile(r"^\s*([a-z]+)\s*\((.*)\)\s*$", re.S)
_TERM = re.compile(r"([+-]?)\s*([^+\-]*?)\s*(?:\*?\s*z\s*(?:\^\s*(\d+))?)?\s*$")


def parse_number(s) -> mp.mpc:
    """Number from JSON data: real, ``[re, im]`` or a complex string."""
    if isinstance(s, (list, tuple)):
        if len(s) != 2:
            raise ConfigInvalid(f"point {s!r} must be [re, im]")
        return mp.mpc(mp.mpf(str(s[0])), mp.mpf(str(s[1])))
    if isinstance(s, bool):
        raise ConfigInvalid("booleans are not numbers")
    try:
        return to_mpc(str(s) if not isinstance(s, str) else s)
    except (ValueError, TypeError) as exc:
        raise ConfigInvalid(f"cannot parse number {s!r}") from exc


def _split_args(body: str) -> list:
    return [a.strip() for a in body.split(",") if a.strip()]


def parse_poly(text: str) -> Poly:
    """``poly(c0, c1, ...)`` or a polynomial in ``z`` such as ``2z^3 - z + 1``."""
    m = _CALL.match(text)
    if m and m.group(1) == "poly":
        args = _split_args(m.group(2))
        if not args:
            raise ConfigInvalid("poly() needs coefficients")
        return Poly([parse_number(a) for a in args])
    src = text.replace(" ", "").replace("**", "^")
    if not src or not re.fullmatch(r"[0-9z+\-*^.eEj()]+", src):
        raise ConfigInvalid(f"cannot parse polynomial {text!r}")
    # split on +/- that are not exponent signs or inside parentheses
    terms, depth, cur = [], 0, ""
    for i, ch in enumerate(src):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and cur and src[i - 1] not in "eE^":
            terms.append(cur)
            cur = ""
        cur += ch
    terms.append(cur)
    coeffs: dict = {}
    for t in terms:
        sign = -1 if t.startswith("-") else 1
        t = t.lstrip("+-")
        if "z" in t:
            c_s, _, rest = t.partition("z")
            c_s = c_s.rstrip("*")
            if rest and not rest.startswith("^"):
                raise ConfigInvalid(f"cannot parse term {t!r}")
            k = int(rest[1:]) if rest else 1
            c = parse_number(c_s.strip("()")) if c_s else mp.mpc(1)
        else:
            k, c = 0, parse_number(t.strip("()"))
        coeffs[k] = coeffs.get(k, mp.mpc(0)) + sign * c
    deg = max(coeffs)
    return Poly([coeffs.get(i, mp.mpc(0)) for i in range(deg + 1)])


def parse_expression(text: str):
    """Parse a density or germ expression into ``(kind, data)``.

    Returns ``("density", Density)`` or ``("germ", AlgebraicGerm)``.
    """
    from .germs import AlgebraicGerm, Density

    m = _CALL.match(text or "")
    if not m:
        raise ConfigInvalid(f"cannot parse expression {text!r}")
    head, body = m.group(1), m.group(2)
    if head == "algpow":
        if ";" not in body:
            raise ConfigInvalid("algpow needs 'P; -1/k'")
        ptxt, etxt = body.rsplit(";", 1)
        em = re.fullmatch(r"\s*-\s*1\s*/\s*(\d+)\s*", etxt)
        if not em or int(em.group(1)) < 2:
            raise ConfigInvalid(f"exponent must be -1/k with k >= 2, got {etxt.strip()!r}")
        P = parse_poly(ptxt.strip())
        if P.degree < 1:
            raise ConfigInvalid("algpow needs a non-constant polynomial")
        try:
            return "germ", AlgebraicGerm(P, int(em.group(1)))
        except ValueError as exc:
            raise ConfigInvalid(f"algpow: {exc}") from exc
    args = _split_args(body)
    if head == "const":
        if len(args) != 1:
            raise ConfigInvalid("const() takes one value")
        c = parse_number(args[0])
        if c == 0:
            raise ConfigInvalid("constant density must be non-zero")
        return "density", Density.const(c)
    if head in ("poly", "exppoly"):
        if not args:
            raise ConfigInvalid(f"{head}() needs coefficients")
        return "density", Density(head, [parse_number(a) for a in args])
    raise ConfigInvalid(f"unknown expression {head!r}")


# ---------------------------------------------------------------------------
# loading and resolution
# ---------------------------------------------------------------------------

def validate(cfg: dict) -> None:
    """Schema check plus semantic checks; raises :class:`ConfigInvalid`."""
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        loc = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigInvalid(f"{loc}: {exc.message}") from exc
    from .pade import SCHEME_KINDS, _ALIASES

    kind = _ALIASES.get(cfg["scheme"]["kind"], cfg["scheme"]["kind"])
    if kind not in SCHEME_KINDS or kind == "conformal":
        raise ConfigInvalid(f"scheme/kind: unsupported kind {cfg['scheme']['kind']!r}")
    if kind == "explicit" and "nodes" not in cfg["scheme"]:
        raise ConfigInvalid("scheme/nodes: explicit scheme needs nodes")
    E = cfg["surface"]["branch_points"]
    if len(E) % 2:
        raise ConfigInvalid("surface/branch_points: need an even number of branch points")
    pts = [parse_number(e) for e in E]
    for i in range(len(pts)):
        for j in range(i):
            if pts[i] == pts[j]:
                raise ConfigInvalid("surface/branch_points: duplicate branch point")
    which, _ = parse_expression(next(iter(cfg["target"].values())))
    if which != next(iter(cfg["target"])):
        raise ConfigInvalid(f"target: expression is a {which}, not a {next(iter(cfg['target']))}")
    if "asymptotics" in cfg.get("stages", []) and which != "density":
        raise ConfigInvalid("stages: asymptotics needs a density target")
    if "symmetry" in cfg.get("stages", []) and kind == "explicit":
        raise ConfigInvalid("stages: symmetry needs a generated scheme")
    if "cuts" in cfg["surface"] and len(cfg["surface"]["cuts"]) != len(E) // 2:
        raise ConfigInvalid("surface/cuts: need one cut per pair of branch points")


def resolve(cfg: dict | None = None, preset: str | None = None, digits: int | None = None) -> dict:
    """Merge preset, file config and defaults, then validate.

    Keys of ``cfg`` override the preset; ``digits`` overrides both.
    """
    if preset is not None and preset not in PRESETS:
        raise ConfigInvalid(f"unknown preset {preset!r}")
    base = copy.deepcopy(PRESETS[preset]) if preset else {}
    if cfg:
        if not isinstance(cfg, dict):
            raise ConfigInvalid("configuration must be a JSON object")
        base.update(copy.deepcopy(cfg))
    out = copy.deepcopy(DEFAULTS)
    out.update(base)
    if digits is not None:
        out["precision_digits"] = int(digits)
    validate(out)
    return out


def load(path) -> dict:
    """Read a JSON configuration file."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigInvalid(f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigInvalid("configuration must be a JSON object")
    return data


def dumps(cfg: dict) -> str:
    return json.dumps(cfg, indent=2, sort_keys=True) + "\n"


def points(values) -> list:
    return [parse_number(v) for v in values]


def as_float_pair(z: Any) -> list:
    z = to_mpc(z)
    return [float(mp.re(z)), float(mp.im(z))]
