"""Asymptotic relative entropy of entanglement (PPT) on OO-invariant states.

Additive points reuse the single-copy value.  The non-additive quadrangle
splits into AYCD, where the value is affine in f, and the triangle CYB,
which is swept by a one-parameter family of straight lines along which the
value is affine between the additivity border BC and the edge segment YX.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .config import get_config, nats_to
from .exceptions import DomainError, GeometryError
from .measures import MeasureResult, relent_nats, reep
from .oo import OOState, bc_line, classify, cy_line, in_triangle, is_additive, key_points
from .rains import rains_aycd, rains_yx

__all__ = [
    "ExtensionLine",
    "TouchReport",
    "p_range",
    "tangent_bound",
    "extension_line",
    "line_residual",
    "line_for_point",
    "region_c_value",
    "region_c_gradient",
    "areep",
    "tangent_touch_check",
    "minimal_convex_extension",
]


@dataclass(frozen=True)
class ExtensionLine:
    p: float
    d: int
    endpoint_bc: tuple
    endpoint_xy: tuple

    def fhat(self, f):
        return -self.p * f + _intercept(self.p, self.d)

    def point(self, t):
        """Point at affine parameter t (0 on BC, 1 on XY)."""
        (f0, g0), (f1, g1) = self.endpoint_bc, self.endpoint_xy
        return f0 + t * (f1 - f0), g0 + t * (g1 - g0)


@dataclass(frozen=True)
class TouchReport:
    p: float
    d: int
    start: tuple
    end: tuple
    extrapolated: float
    target: float
    gap: float
    ok: bool


def p_range(d):
    """(p_min, p_max) = (-d/2, -2/(d+2)); p_min gives the edge XB, p_max the line CY."""
    return -d / 2, -2 / (d + 2)


def _intercept(p, d):
    return p * (d * d - 2 + (d - 2) * p) / (2 + d * (p - 2) - 2 * p)


def tangent_bound(f, d, base=None):
    """Tangent to the Werner REEP at f = -2/d, extended to f < -2/d."""
    v = 0.5 * (1 + f) * math.log((d - 2) / (d + 2)) + math.log((d + 2) / d)
    return nats_to(v, base)


def extension_line(p, d) -> ExtensionLine:
    lo, hi = p_range(d)
    tol = 1e-12
    if not (lo - tol <= p <= hi + tol):
        raise DomainError(f"p={p} outside [{lo}, {hi}]")
    p = min(max(p, lo), hi)
    den = d * p - 2 * d - 2 * p + 2
    fx = (d * p + 2 * d - 2 * p - 2) / den
    fb = (d * d * p - 2 * d * p + 6 * d - 8) / (d * den)
    return ExtensionLine(p, d, (fb, bc_line(d, fb)), (fx, d * (1 + fx) / 2))


def line_residual(p, d, f, fhat):
    return fhat + p * f - _intercept(p, d)


def line_for_point(rho: OOState) -> ExtensionLine:
    """The extension line through a point of CYB."""
    d, f, fh = rho.d, rho.f, rho.fhat
    tol = get_config().tol_geo
    if d < 3 or is_additive(d, f, fh) or fh < cy_line(d, f) - tol:
        raise GeometryError(f"({f}, {fh}) is not in the triangle CYB")
    lo, hi = p_range(d)
    if abs(fh - d * (1 + f) / 2) <= 1e-12:
        # on the edge AB every point satisfies the p = -d/2 line; use the
        # line whose YX endpoint is this point instead
        if f >= key_points(d).X[0] - 1e-12:
            return extension_line(lo, d)
        return extension_line(2 * (d - 1) * (1 + f) / ((f - 1) * (d - 2)), d)
    r_lo = line_residual(lo, d, f, fh)
    r_hi = line_residual(hi, d, f, fh)
    if abs(r_lo) <= 1e-12:
        p = lo
    elif abs(r_hi) <= 1e-12:
        p = hi
    elif r_lo * r_hi > 0:
        raise GeometryError(f"no extension line through ({f}, {fh})")
    else:
        p = brentq(line_residual, lo, hi, args=(d, f, fh), xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return extension_line(p, d)


def region_c_value(d, f, fh):
    """Single-copy REEP with witness s = 0, shat = 1 (nats)."""
    return relent_nats(d, f, fh, 0.0, 1.0)


def region_c_gradient(d, f, fh):
    """Gradient (d/df, d/dfhat) of :func:`region_c_value`."""
    L = math.log((d + d * f - 2 * fh) / (d - 2))
    return 0.5 * L - 0.5 * math.log(1 - f), (math.log(fh) - L) / d


def _directional(d, p, f, fh):
    """d/df of region_c_value along fhat = -p f + const."""
    coef_w = 0.5 + p / d  # vanishes on the edge, where the W weight is zero
    out = -0.5 * math.log(1 - f) - p / d * math.log(fh)
    if abs(coef_w) > 1e-15:
        out += coef_w * math.log((d + d * f - 2 * fh) / (d - 2))
    return out


def areep(rho: OOState, base=None) -> MeasureResult:
    region = classify(rho)
    d, f, fh = rho.d, rho.f, rho.fhat
    if region.tag == "PPT":
        return MeasureResult(0.0, (f, fh), region)
    if region.additive:
        r = reep(rho, base)
        return MeasureResult(r.value, r.witness, region, "additive")
    if d == 2:
        raise DomainError("non-additive region needs d >= 3")
    if region.subtag == "AYCD":
        return MeasureResult(rains_aycd(f, d, base), None, region, "affine_AYCD")
    line = line_for_point(rho)
    (fb, gb), (fx, _) = line.endpoint_bc, line.endpoint_xy
    t = (f - fb) / (fx - fb)
    value = (1 - t) * region_c_value(d, fb, gb) + t * rains_yx(fx, d, base="e")
    return MeasureResult(nats_to(value, base), None, region, "affine_CYB", {"p": line.p, "t": t})


def tangent_touch_check(p, d, tol=1e-7, base=None) -> TouchReport:
    """Extrapolate the tangent of the additive value at the BC end of a line to its YX end."""
    line = extension_line(p, d)
    (fb, gb), (fx, gx) = line.endpoint_bc, line.endpoint_xy
    start = region_c_value(d, fb, gb)
    extrap = start + _directional(d, line.p, fb, gb) * (fx - fb)
    target = rains_yx(fx, d, base="e")
    gap = abs(extrap - target)
    return TouchReport(
        line.p,
        d,
        line.endpoint_bc,
        line.endpoint_xy,
        nats_to(extrap, base),
        nats_to(target, base),
        nats_to(gap, base),
        gap <= tol,
    )


def minimal_convex_extension(rho: OOState, n_border: int = 400, h: float = 1e-6, base=None):
    """Supremum of tangent planes of the REEP taken at points of the additivity border.

    A lower bound on the regularised REEP wherever that function is convex;
    equality is expected on the non-additive region.  Gradients are central
    finite differences of the closed-form REEP.
    """
    d = rho.d
    kp = key_points(d)
    (fc, gc), (fb, gb), (fd, gd) = kp.C, kp.B, kp.D
    pts = []
    for t in np.linspace(0, 1, n_border):
        pts.append((fd, gd + t * (gc - gd)))  # segment DC
        pts.append((fc + t * (fb - fc), gc + t * (gb - gc)))  # segment CB

    def val(f, g):
        return reep(OOState(d, f, g), base="e").value

    best = -math.inf
    for f0, g0 in pts:
        # step into the additive side; skip points too close to the triangle edges
        fp, fm = f0 + h, f0 - h
        gp, gm = g0 + h, g0 - h
        if not all(in_triangle(d, a, b, tol=0) for a, b in ((fp, g0), (fm, g0), (f0, gp), (f0, gm))):
            continue
        v0 = val(f0, g0)
        gf = (val(fp, g0) - val(fm, g0)) / (2 * h)
        gg = (val(f0, gp) - val(f0, gm)) / (2 * h)
        best = max(best, v0 + gf * (rho.f - f0) + gg * (rho.fhat - g0))
    return nats_to(max(best, 0.0), base)
