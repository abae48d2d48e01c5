"""Straight-line least squares on log axes."""

from __future__ import annotations

import numpy as np


def powerlaw_fit(xs, ys) -> tuple[float, float]:
    """Fit log y = slope * log x + intercept; returns (slope, intercept)."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    design = np.vstack([lx, np.ones_like(lx)]).T
    coef = np.linalg.lstsq(design, ly, rcond=None)[0]
    return float(coef[0]), float(coef[1])


def log2_fit(xs, ys) -> tuple[float, float]:
    """Fit log2 y = slope * x + intercept, x kept linear.

    This is the halving-per-size form used for spread-versus-width
    figures, where the controlled quantity shrinks geometrically in the
    register width rather than polynomially.
    """
    xs = np.asarray(xs, dtype=float)
    ly = np.log2(np.asarray(ys, dtype=float))
    design = np.vstack([xs, np.ones_like(xs)]).T
    coef = np.linalg.lstsq(design, ly, rcond=None)[0]
    return float(coef[0]), float(coef[1])
