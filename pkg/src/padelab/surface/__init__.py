"""Hyperelliptic surfaces, Green functions and symmetric contours."""

from .core import (
    Cycle,
    Divisor,
    HoloBasis,
    Surface,
    SurfacePoint,
    ThirdKind,
    eval_w,
    make_surface,
)
from .cuts import CutSystem

__all__ = [
    "Cycle",
    "CutSystem",
    "Divisor",
    "HoloBasis",
    "Surface",
    "SurfacePoint",
    "ThirdKind",
    "eval_w",
    "make_surface",
]
