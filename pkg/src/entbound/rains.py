"""Rains bound on OO-invariant states.

Two independent routes:

* :func:`rains_closed` -- piecewise closed forms (additive reuse, the affine
  AYCD formula, and an exact one-dimensional minimisation on the line
  shat = 1 for CYB);
* :func:`rains_numeric` -- direct minimisation over the sigma triangle
  (grid starts, then SLSQP on each smooth piece) together with the convex
  reformulation in tau = sigma / Tr|sigma^T2|, also solved with SLSQP.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .config import get_config, nats_to
from .exceptions import ConvergenceError, DomainError
from .measures import (
    MeasureResult,
    _ZERO,
    negativity_nats,
    relent_nats,
    reep_witness,
)
from .oo import OOState, classify, projector_traces, pt_matrix, uvw_weights

__all__ = [
    "RainsWitness",
    "ExclusionReport",
    "rains_objective",
    "rains_objective_nats",
    "megaformel",
    "stationary_point",
    "rains_aycd",
    "rains_yx",
    "rains_xb",
    "boundary_minimum",
    "rains_closed",
    "rains_numeric",
    "tau_relative_entropy",
    "shat_gt1_stationary",
    "shat_gt1_branch_excluded",
]


@dataclass(frozen=True)
class RainsWitness:
    s: float
    shat: float
    branch: str  # additive_reuse | stationary_AYCD | boundary_shat1


@dataclass(frozen=True)
class ExclusionReport:
    excluded: bool
    s: float
    shat: float
    violated: tuple


def rains_objective_nats(d, f, fh, s, sh) -> float:
    """S(rho||sigma) + log Tr|sigma^T2| in nats."""
    r = relent_nats(d, f, fh, s, sh)
    if math.isinf(r):
        return r
    return r + math.log(negativity_nats(d, s, sh))


def rains_objective(rho: OOState, sigma: OOState, base=None) -> float:
    if rho.d != sigma.d:
        raise DomainError("dimension mismatch")
    return nats_to(rains_objective_nats(rho.d, rho.f, rho.fhat, sigma.f, sigma.fhat), base)


def _xlog(weight, num, den):
    if num <= _ZERO:
        return 0.0
    if den <= 0:
        return math.inf
    return weight * math.log(num / den)


def megaformel(rho: OOState, s: float, shat: float, base=None) -> float:
    """Rains objective written for the branch s <= 0, shat <= 1."""
    d, f, fh = rho.d, rho.f, rho.fhat
    wr = d + d * f - 2 * fh
    # (f-1)/(s-1) is written as (1-f)/(1-s): both factors are negative
    bracket = (
        _xlog(2 * fh, fh, shat)
        + _xlog(d - d * f, 1 - f, 1 - s)
        + _xlog(wr, wr, d + d * s - 2 * shat)
    )
    return nats_to(math.log((d - 2 * s) / d) + bracket / (2 * d), base)


def stationary_point(rho: OOState) -> RainsWitness:
    """Interior stationary point of the shat <= 1 objective."""
    d, f, fh = rho.d, rho.f, rho.fhat
    den = d + 2 * f
    if abs(den) < 1e-15:
        raise DomainError("stationary point singular at d + 2f = 0")
    s = (2 + d * f) / den
    sh = (2 + d) * fh / den
    branch = "stationary_AYCD" if sh <= 1 + get_config().tol_geo else "boundary_shat1"
    return RainsWitness(s, sh, branch)


def rains_aycd(f, d, base=None):
    """Affine Rains bound on AYCD (depends on f only)."""
    v = 0.5 * ((1 + f) * math.log(d - 2) - 2 * math.log(d) - (f - 1) * math.log(d + 2))
    return nats_to(v, base)


def rains_yx(f, d, base=None):
    """Rains bound on the edge segment between Y and X."""

    def xlog(w, x):
        return w * math.log(x) if w > 0 else 0.0

    v = (
        xlog((1 + f) / 2, d * (1 + f))
        + xlog((1 - f) / 2, d * (1 - f) / (d - 1))
        + math.log((d * (d + 2) - 4) / d**2)
        - math.log(2)
    )
    return nats_to(v, base)


def rains_xb(f, d, base=None):
    """Affine Rains bound on the edge segment between X and B."""
    v = (1 + f) / 2 * math.log(d - 2) + (f - 1) / 2 * math.log(d / 4)
    return nats_to(v, base)


def boundary_minimum(rho: OOState):
    """Minimise the Rains objective over sigma on the line shat = 1, s <= 0.

    The derivative in s has a quadratic numerator; its real roots in the
    feasible interval together with the interval ends are the only
    candidates.  Returns ``(value_nats, s)``.
    """
    d, f, fh = rho.d, rho.f, rho.fhat
    wr = d + d * f - 2 * fh
    s_lo = 2 / d - 1  # sigma on the triangle edge
    P = np.polynomial.Polynomial
    s = P([0.0, 1.0])
    num = (
        -4 * (1 - s) * (d + d * s - 2)
        + (1 - f) * (d - 2 * s) * (d + d * s - 2)
        - wr * (d - 2 * s) * (1 - s)
    )
    candidates = [0.0, s_lo]
    for r in num.roots():
        if abs(r.imag) < 1e-12 and s_lo < r.real < 0:
            candidates.append(float(r.real))
    best = min((rains_objective_nats(d, f, fh, c, 1.0), c) for c in candidates)
    return best


def rains_closed(rho: OOState, base=None) -> MeasureResult:
    region = classify(rho)
    d, f, fh = rho.d, rho.f, rho.fhat
    if region.tag == "PPT":
        return MeasureResult(0.0, (f, fh), region)
    if region.additive:
        _, (s, sh) = reep_witness(rho)
        value = relent_nats(d, f, fh, s, sh)
        return MeasureResult(nats_to(value, base), (s, sh), region, "additive_reuse")
    if d == 2:
        raise DomainError("closed-form Rains bound needs d >= 3 outside the additive region")
    if region.subtag == "AYCD":
        w = stationary_point(rho)
        return MeasureResult(rains_aycd(f, d, base), (w.s, w.shat), region, "stationary_AYCD")
    value, s = boundary_minimum(rho)
    return MeasureResult(nats_to(value, base), (s, 1.0), region, "boundary_shat1")


# ---------------------------------------------------------------- numeric route


def _triangle_candidates(d, f, fh, n=41):
    """Objective on a grid of the sigma triangle plus its edges and kink lines (vectorised)."""
    u = np.linspace(0.0, 1.0, n)
    S = (-1 + 2 * u)[:, None] * np.ones(n)[None, :]
    SH = d * (1 + S) / 2 * u[None, :]
    t = np.linspace(0.0, 1.0, 4 * n)
    P = np.vstack(
        [
            np.column_stack([S.ravel(), SH.ravel()]),
            np.column_stack([np.zeros_like(t), d / 2 * t]),  # s = 0
            np.column_stack([2 / d - 1 + (2 - 2 / d) * t, np.ones_like(t)]),  # shat = 1
            np.column_stack([-1 + 2 * t, np.zeros_like(t)]),  # fhat = 0 edge
            np.column_stack([-1 + 2 * t, d * t]),  # upper edge
        ]
    )
    s, sh = P[:, 0], P[:, 1]
    wr = d + d * f - 2 * fh
    total = np.zeros(len(P))
    with np.errstate(divide="ignore", invalid="ignore"):
        for weight, num, den in ((fh / d, fh, sh), ((1 - f) / 2, 1 - f, 1 - s), (wr / (2 * d), wr, d + d * s - 2 * sh)):
            if num > _ZERO:
                total += np.where(den > 0, weight * np.log(num / np.where(den > 0, den, 1.0)), np.inf)
        total += np.log(np.abs(s) / d + np.abs(1 - sh) / 2 + (d + d * sh - 2 * s) / (2 * d))
    return P, total


def _piece_objective(d, f, fh, sign_s, sign_h):
    """Objective and gradient on the piece where sign(s) and sign(1 - shat) are fixed.

    There the negativity is affine, so the objective is smooth.
    """
    wr = d + d * f - 2 * fh
    log = math.log

    def fun(x):
        s, sh = x
        val = gs = gh = 0.0
        if fh > _ZERO:
            val += fh / d * log(fh / sh)
            gh -= fh / (d * sh)
        if 1 - f > _ZERO:
            val += (1 - f) / 2 * log((1 - f) / (1 - s))
            gs += (1 - f) / (2 * (1 - s))
        if wr > _ZERO:
            ws = d + d * s - 2 * sh
            val += wr / (2 * d) * log(wr / ws)
            gs -= wr / (2 * ws)
            gh += wr / (d * ws)
        neg = sign_s * s / d + sign_h * (1 - sh) / 2 + (d + d * sh - 2 * s) / (2 * d)
        val += log(neg)
        gs += (sign_s - 1) / (d * neg)
        gh += (1 - sign_h) / (2 * neg)
        return val, np.array([gs, gh])

    return fun


def _sigma_form(rho: OOState, starts: int, max_iter: int):
    """Minimise S(rho||sigma) + log Tr|sigma^T2| over the sigma triangle.

    The triangle is cut into four pieces by the kinks s = 0 and shat = 1.
    Each piece is solved with SLSQP from its best grid points; the reep
    witness is added as an extra start.
    """
    d, f, fh = rho.d, rho.f, rho.fhat
    wr = d + d * f - 2 * fh
    eps = 1e-13
    P, vals = _triangle_candidates(d, f, fh)
    P = np.vstack([P, reep_witness(rho)[1]])
    vals = np.append(vals, rains_objective_nats(d, f, fh, *P[-1]))
    per_piece = max(1, (starts - 1) // 4)
    k_best = int(np.argmin(vals))
    best = (float(vals[k_best]), (float(P[k_best, 0]), float(P[k_best, 1])))
    converged = False
    for sign_s in (-1, 1):
        for sign_h in (1, -1):  # sign of 1 - shat
            in_piece = np.isfinite(vals) & (sign_s * P[:, 0] >= -1e-15) & (sign_h * (1 - P[:, 1]) >= -1e-15)
            idx = np.flatnonzero(in_piece)
            if idx.size == 0:
                continue
            picks = list(idx[np.argsort(vals[idx])[:per_piece]])
            if in_piece[-1] and len(P) - 1 not in picks:
                picks.append(len(P) - 1)
            lo_s, hi_s = (-1.0, 0.0) if sign_s < 0 else (0.0, 1.0 - eps)
            lo_h, hi_h = ((eps if fh > _ZERO else 0.0), 1.0) if sign_h > 0 else (1.0, float(d))
            cons = {
                "type": "ineq",
                "fun": lambda x: np.array([d * (1 + x[0]) / 2 - x[1], d + d * x[0] - 2 * x[1] - (eps if wr > _ZERO else 0.0)]),
                "jac": lambda x: np.array([[d / 2, -1.0], [d, -2.0]]),
            }
            fun = _piece_objective(d, f, fh, sign_s, sign_h)
            for k in picks:
                x0 = np.clip(P[k], [lo_s, lo_h], [hi_s, hi_h])
                with np.errstate(all="ignore"), warnings.catch_warnings():
                    warnings.simplefilter("ignore", RuntimeWarning)
                    try:
                        res = minimize(
                            fun,
                            x0,
                            jac=True,
                            method="SLSQP",
                            bounds=[(lo_s, hi_s), (lo_h, hi_h)],
                            constraints=[cons],
                            options={"ftol": 1e-16, "maxiter": max_iter},
                        )
                    except (ValueError, ZeroDivisionError):
                        continue  # start on a support boundary; the grid value stands
                converged |= bool(res.success)
                xs, xh = float(res.x[0]), float(res.x[1])
                if not (xs <= 1 and 0 <= xh <= d * (1 + xs) / 2 + 1e-12):
                    continue
                val = rains_objective_nats(d, f, fh, xs, xh)
                if val < best[0]:
                    best = (val, (xs, xh))
    return best, converged


def tau_relative_entropy(rho: OOState, x) -> float:
    """S(rho||tau) in nats for tau = x[0] U + x[1] V + x[2] W (unnormalised)."""
    tr = projector_traces(rho.d)
    total = 0.0
    for t, r, xi in zip(tr, uvw_weights(rho), x):
        if r * t <= _ZERO:
            continue
        if xi <= 0:
            return math.inf
        total += t * r * math.log(r / xi)
    return total


def _tau_form(rho: OOState, max_iter: int):
    d = rho.d
    tr = projector_traces(d)
    M = pt_matrix(d).T  # tau weights -> weights of tau^T2
    r = np.array(uvw_weights(rho))
    mask = r * tr > _ZERO

    def obj(z):
        x = np.maximum(z[:3], 1e-300)
        return float(np.sum((tr * r * np.log(np.where(mask, r, 1.0) / x))[mask]))

    def jac(z):
        g = np.zeros(6)
        g[:3] = np.where(mask, -tr * r / np.maximum(z[:3], 1e-300), 0.0)
        return g

    # slack y >= |M x| turns Tr|tau^T2| <= 1 into linear constraints
    cons = [
        {"type": "ineq", "fun": lambda z: z[3:] - M @ z[:3], "jac": lambda z: np.hstack([-M, np.eye(3)])},
        {"type": "ineq", "fun": lambda z: z[3:] + M @ z[:3], "jac": lambda z: np.hstack([M, np.eye(3)])},
        {
            "type": "ineq",
            "fun": lambda z: np.array([1 - tr @ z[3:]]),
            "jac": lambda z: np.hstack([np.zeros(3), -tr])[None, :],
        },
    ]
    x0 = np.maximum(r, 1e-3) * 0.5
    z0 = np.hstack([x0, np.abs(M @ x0)])
    with np.errstate(all="ignore"), warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # SLSQP bound clipping
        res = minimize(
            obj,
            z0,
            jac=jac,
            constraints=cons,
            bounds=[(1e-14, None)] * 3 + [(0, None)] * 3,
            method="SLSQP",
            options={"ftol": 1e-15, "maxiter": max_iter},
        )
    x = np.maximum(res.x[:3], 0.0)
    # recompute the objective at a strictly feasible point
    neg = float(tr @ np.abs(M @ x))
    if neg > 1:
        x = x / neg
    value = tau_relative_entropy(rho, x)
    trace = float(tr @ x)
    # sigma = tau / Tr tau; F has eigenvalues +1, -1, +1 on U, V, W
    s = float(tr @ (np.array([1.0, -1.0, 1.0]) * x)) / trace
    sh = d * float(x[0]) / trace
    return value, (s, sh), res


def rains_numeric(rho: OOState, base=None, starts: int = 9, max_iter: int = 4000) -> MeasureResult:
    """Rains bound by direct numerical minimisation (independent of the closed forms).

    ``info`` carries the best value of both formulations (in nats):
    ``sigma_form`` (log-negativity penalty over states) and ``tau_form``
    (relative entropy over the convex set Tr|tau^T2| <= 1).
    """
    region = classify(rho)
    if region.tag == "PPT":
        return MeasureResult(0.0, (rho.f, rho.fhat), region, info={"sigma_form": 0.0, "tau_form": 0.0})
    (sig_val, sig_x), converged = _sigma_form(rho, starts, max_iter)
    tau_val, tau_x, tau_res = _tau_form(rho, max_iter)
    info = {"sigma_form": sig_val, "tau_form": tau_val, "tau_status": int(tau_res.status)}
    if not (converged or tau_res.success) and not (math.isfinite(sig_val) or math.isfinite(tau_val)):
        raise ConvergenceError("no formulation converged", best=min(sig_val, tau_val))
    value, witness = (sig_val, sig_x) if sig_val <= tau_val else (tau_val, tau_x)
    if not math.isfinite(value):
        raise ConvergenceError("Rains objective infinite at every start", best=value)
    return MeasureResult(nats_to(value, base), witness, region, "numeric", info)


# ---------------------------------------------------------------- shat > 1 branch


def shat_gt1_stationary(rho: OOState):
    """Stationary point of the objective in the branch shat > 1 (may be infinite)."""
    d, f, fh = rho.d, rho.f, rho.fhat
    den = (d * d - 2) * f - d * fh
    if abs(den) < 1e-15:
        return math.inf, math.inf
    return (d * d - d * fh - 2) / den, -2 * fh / den


def shat_gt1_branch_excluded(rho: OOState) -> ExclusionReport:
    """Check that the shat > 1 stationary point is never a feasible sigma."""
    d = rho.d
    s, sh = shat_gt1_stationary(rho)
    if not (math.isfinite(s) and math.isfinite(sh)):
        return ExclusionReport(True, s, sh, ("singular",))
    violated = []
    if not sh > 1:
        violated.append("shat>1")
    if sh < 0:
        violated.append("fhat>=0")
    if s > 1:
        violated.append("f<=1")
    if sh > d * (1 + s) / 2:
        violated.append("fhat<=d(1+f)/2")
    return ExclusionReport(bool(violated), s, sh, tuple(violated))
