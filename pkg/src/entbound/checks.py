"""Oracle suites run by ``entbound check``.

Each suite compares a closed form against an independent numerical route and
returns a dict with the largest deviation seen and the tolerance it must meet.
"""
from __future__ import annotations

import time

import numpy as np

from .areep import areep, p_range, tangent_touch_check
from .binegativity import binegativity_defect, random_pure_states, search_binegative
from .measures import (
    additivity_check,
    negativity_closed,
    reep,
    reep_grid_search,
    reep_witness,
    relent_closed,
)
from .oo import OOState, cy_line, embed, is_additive, is_ppt, sample_states, triangle_grid
from .operators import partial_transpose, relative_entropy, trace_norm_pt
from .rains import megaformel, rains_closed, rains_numeric, stationary_point

BUDGETS = {
    "quick": dict(pairs=10, grid=8, random=10, pure=500, oo_grid=30),
    "default": dict(pairs=50, grid=25, random=50, pure=10_000, oo_grid=100),
    "full": dict(pairs=50, grid=50, random=200, pure=10_000, oo_grid=200),
}


def _result(name, d, n, dev, tol, started):
    return {
        "suite": name,
        "d": d,
        "n": n,
        "max_deviation": float(dev),
        "tolerance": tol,
        "passed": bool(dev <= tol),
        "seconds": round(time.perf_counter() - started, 3),
    }


def relent_matrix(d, budget, rng):
    t0 = time.perf_counter()
    dev = 0.0
    n = budget["pairs"]
    for rho, sigma in zip(sample_states(d, n, rng), sample_states(d, n, rng)):
        closed = relent_closed(rho, sigma, base="e")
        full = relative_entropy(embed(rho), embed(sigma), base="e")
        dev = max(dev, abs(closed - full))
    return _result("relent-matrix", d, n, dev, 1e-10, t0)


def negativity_matrix(d, budget, rng):
    t0 = time.perf_counter()
    n = budget["pairs"]
    dev = max(abs(negativity_closed(s) - trace_norm_pt(embed(s))) for s in sample_states(d, n, rng))
    return _result("negativity-matrix", d, n, dev, 1e-10, t0)


def rains_equivalence(d, budget, rng):
    t0 = time.perf_counter()
    dev, n = 0.0, 0
    for rho in triangle_grid(d, budget["grid"]):
        dev = max(dev, abs(rains_closed(rho, base="e").value - rains_numeric(rho, base="e").value))
        n += 1
    return _result("rains-equivalence", d, n, dev, 1e-6, t0)


def areep_rains(d, budget, rng):
    t0 = time.perf_counter()
    dev, n = 0.0, 0
    for rho in triangle_grid(d, 2 * budget["grid"]):
        dev = max(dev, abs(areep(rho, base="e").value - rains_closed(rho, base="e").value))
        n += 1
    return _result("areep-rains", d, n, dev, 1e-8, t0)


def reep_oracle(d, budget, rng):
    t0 = time.perf_counter()
    n = budget["random"]
    dev = 0.0
    for rho in sample_states(d, n, rng, region=lambda d, f, g: not is_ppt(d, f, g)):
        oracle, _ = reep_grid_search(rho, base="e")
        dev = max(dev, abs(reep(rho, base="e").value - oracle))
    return _result("reep-oracle", d, n, dev, 1e-6, t0)


def matrix_additivity(rho: OOState) -> bool:
    """|(rho sigma^-1)^T2| <= 1 tested on full matrices."""
    _, witness = reep_witness(rho)
    R = embed(rho)
    S = embed(OOState(rho.d, *witness))
    X = partial_transpose(R @ np.linalg.pinv(S, rcond=1e-12, hermitian=True))
    X = (X + X.T.conj()) / 2
    return bool(np.max(np.abs(np.linalg.eigvalsh(X))) <= 1 + 1e-9)


def additivity_matrix(d, budget, rng):
    t0 = time.perf_counter()
    n = budget["random"]
    states = sample_states(d, n, rng, region=lambda d, f, g: not is_ppt(d, f, g))
    mismatches = sum(additivity_check(s).weak != matrix_additivity(s) for s in states)
    return _result("additivity-matrix", d, n, mismatches, 0, t0)


def tangent_touch(d, budget, rng):
    t0 = time.perf_counter()
    lo, hi = p_range(d)
    ps = np.linspace(lo, hi, 20)
    dev = max(tangent_touch_check(p, d, base="e").gap for p in ps)
    return _result("tangent-touch", d, len(ps), dev, 1e-7, t0)


def stationarity(d, budget, rng, h=1e-5):
    t0 = time.perf_counter()
    n = budget["random"]

    def aycd(d, f, g):
        return not is_ppt(d, f, g) and not is_additive(d, f, g) and g < cy_line(d, f)

    dev = 0.0
    for rho in sample_states(d, n, rng, region=aycd):
        w = stationary_point(rho)
        gs = (megaformel(rho, w.s + h, w.shat, base="e") - megaformel(rho, w.s - h, w.shat, base="e")) / (2 * h)
        if rho.fhat > 0:
            gh = (megaformel(rho, w.s, w.shat + h, base="e") - megaformel(rho, w.s, w.shat - h, base="e")) / (2 * h)
        else:
            gh = 0.0  # objective does not depend on shat when fhat = 0
        dev = max(dev, abs(gs), abs(gh))
    return _result("stationarity", d, n, dev, 1e-6, t0)


def binegative_pure(d, budget, rng):
    t0 = time.perf_counter()
    n = budget["pure"]
    psi = random_pure_states(rng, n, d * d)
    rho = psi[:, :, None] * psi.conj()[:, None, :]
    worst = float(np.min(binegativity_defect(rho, check=False)))
    return _result("binegative-pure", d, n, max(0.0, -worst), 1e-10, t0)


def binegative_oo(d, budget, rng):
    t0 = time.perf_counter()
    mats = np.array([embed(s) for s in triangle_grid(d, budget["oo_grid"])])
    worst = float(np.min(binegativity_defect(mats, check=False)))
    return _result("binegative-oo", d, len(mats), max(0.0, -worst), 1e-10, t0)


def binegative_d2(d, budget, rng):
    """Random search in 2 x 2; any defect below the find threshold fails."""
    t0 = time.perf_counter()
    n = budget["pure"]
    report = search_binegative(2, n, seed=int(rng.integers(2**31)), bias_boundary=False)
    return _result("binegative-d2", 2, n, max(0.0, -report.defect), 1e-8, t0)


SUITES = {
    "relent-matrix": relent_matrix,
    "negativity-matrix": negativity_matrix,
    "rains-equivalence": rains_equivalence,
    "areep-rains": areep_rains,
    "reep-oracle": reep_oracle,
    "additivity-matrix": additivity_matrix,
    "tangent-touch": tangent_touch,
    "stationarity": stationarity,
    "binegative-pure": binegative_pure,
    "binegative-oo": binegative_oo,
    "binegative-d2": binegative_d2,
}


def run_suites(d, names=None, budget="default", seed=0):
    names = list(SUITES) if not names else names
    spec = BUDGETS[budget]
    results = []
    for name in names:
        rng = np.random.default_rng([seed, d, sorted(SUITES).index(name)])
        results.append(SUITES[name](d, spec, rng))
    return {"d": d, "budget": budget, "seed": seed, "passed": all(r["passed"] for r in results), "suites": results}
