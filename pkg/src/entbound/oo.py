"""The two-parameter family of O(x)O-invariant bipartite states.

A state is fixed by d and the expectation values f = <F> (flip) and
fhat = <Fhat> (unnormalised maximally entangled projector).  In the spectral
basis of orthogonal projectors U, V, W the state is diagonal, which is what
makes every quantity in this package computable in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .config import get_config
from .exceptions import DomainError
from .operators import check_hermitian, local_dim

__all__ = [
    "OOState",
    "Region",
    "KeyPoints",
    "projector_traces",
    "pt_matrix",
    "basis_operators",
    "projectors",
    "coeffs",
    "uvw_weights",
    "pt",
    "embed",
    "twirl",
    "classify",
    "key_points",
    "in_triangle",
    "is_ppt",
    "is_additive",
    "bc_line",
    "cy_line",
    "sample_states",
    "triangle_grid",
]


def in_triangle(d, f, fhat, tol=None) -> bool:
    tol = get_config().tol_geo if tol is None else tol
    return fhat >= -tol and f <= 1 + tol and fhat <= d * (1 + f) / 2 + tol


def is_ppt(d, f, fhat, tol=None) -> bool:
    tol = get_config().tol_geo if tol is None else tol
    return f >= -tol and fhat <= 1 + tol


def bc_line(d, f):
    """fhat on the line through B and C (upper additivity border)."""
    return 3 - 4 / d + (d - 1) * f


def cy_line(d, f):
    """fhat on the line through C and Y; below it the Rains optimum is interior."""
    return (d + 2 * f) / (d + 2)


def is_additive(d, f, fhat, tol=None) -> bool:
    """Rains' weak additivity condition, as a pair of linear inequalities."""
    tol = get_config().tol_geo if tol is None else tol
    return f >= -2 / d - tol and fhat <= bc_line(d, f) + tol


@dataclass(frozen=True)
class OOState:
    d: int
    f: float
    fhat: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise DomainError(f"local dimension must be an integer >= 2, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "f", float(self.f))
        object.__setattr__(self, "fhat", float(self.fhat))
        if not in_triangle(self.d, self.f, self.fhat):
            raise DomainError(
                f"(f, fhat) = ({self.f}, {self.fhat}) is not a state for d={self.d}"
            )

    @property
    def weights(self):
        return uvw_weights(self)

    @property
    def is_ppt(self) -> bool:
        return is_ppt(self.d, self.f, self.fhat)

    @classmethod
    def maximally_mixed(cls, d):
        return cls(d, 1 / d, 1 / d)


class Region(NamedTuple):
    tag: str
    subtag: str | None = None

    @property
    def additive(self) -> bool:
        return self.tag == "PPT" or (self.subtag or "").startswith("additive")


class KeyPoints(NamedTuple):
    A: tuple
    B: tuple
    C: tuple
    D: tuple
    E: tuple
    X: tuple
    Y: tuple


def key_points(d: int) -> KeyPoints:
    if d < 3:
        raise DomainError("key points need d >= 3")
    den = d * (d + 2) - 4
    return KeyPoints(
        A=(-1.0, 0.0),
        B=((d - 4) / d, float(d - 2)),
        C=(-2 / d, (d - 2) / d),
        D=(-2 / d, 0.0),
        E=(0.0, 1.0),
        X=((4 - 6 * d + d * d) / den, d * d * (d - 2) / den),
        Y=(-d * d / den, d * (d - 2) / den),
    )


def projector_traces(d):
    return np.array([1.0, d * (d - 1) / 2, (d + 2) * (d - 1) / 2])


def pt_matrix(d):
    """Row k holds the U, V, W coefficients of the partial transpose of U, V, W.

    ``pt_matrix(d).T @ x`` maps weights of ``xU U + xV V + xW W`` to the
    weights of its partial transpose.
    """
    return np.array(
        [
            [1 / d, -1 / d, 1 / d],
            [(1 - d) / 2, 0.5, 0.5],
            [(1 + d) / 2 - 1 / d, 0.5 + 1 / d, 0.5 - 1 / d],
        ]
    )


@lru_cache(maxsize=16)
def _basis(d):
    n = d * d
    idx = np.arange(n)
    i, j = np.divmod(idx, d)
    flip = np.zeros((n, n))
    flip[i * d + j, j * d + i] = 1.0
    fhat = np.zeros((n, n))
    diag = np.arange(d) * (d + 1)
    fhat[np.ix_(diag, diag)] = 1.0
    one = np.eye(n)
    for m in (one, flip, fhat):
        m.setflags(write=False)
    return one, flip, fhat


def basis_operators(d):
    """(1, F, Fhat) as d^2 x d^2 real matrices (read-only)."""
    return _basis(d)


@lru_cache(maxsize=16)
def _projectors(d):
    one, flip, fhat = _basis(d)
    U = fhat / d
    V = (one - flip) / 2
    W = (one + flip) / 2 - fhat / d
    for m in (U, V, W):
        m.setflags(write=False)
    return U, V, W


def projectors(d):
    """Orthogonal spectral projectors (U, V, W), summing to the identity."""
    return _projectors(d)


def coeffs(state: OOState):
    """(a, b, c) with rho = a*1 + b*F + c*Fhat."""
    d, f, fh = state.d, state.f, state.fhat
    k = 1.0 / (d * (d - 1) * (d + 2))
    a = k * ((d + 1) - f - fh)
    b = k * (-1 + (d + 1) * f - fh)
    c = k * (-1 - f + (d + 1) * fh)
    return a, b, c


def uvw_weights(state: OOState):
    """Eigenvalues of rho on the U, V, W eigenspaces."""
    d, f, fh = state.d, state.f, state.fhat
    return (
        fh / d,
        (1 - f) / (d * (d - 1)),
        (d + d * f - 2 * fh) / (d * (d - 1) * (d + 2)),
    )


def pt(state: OOState):
    """Coordinates of the partial transpose: (f, fhat) -> (fhat, f).

    Returned as a plain pair because the image need not be a state.
    """
    return state.fhat, state.f


def embed(state: OOState) -> np.ndarray:
    U, V, W = projectors(state.d)
    wu, wv, ww = uvw_weights(state)
    return wu * U + wv * V + ww * W


def twirl(M, tol: float | None = None) -> OOState:
    """Project a state onto the OO-invariant family, keeping <F> and <Fhat>."""
    cfg = get_config()
    tol = cfg.tol_psd if tol is None else tol
    M = check_hermitian(M)
    d = local_dim(M)
    if abs(np.trace(M).real - 1) > 1e-9 or np.linalg.eigvalsh(M)[0] < -tol:
        raise DomainError("twirl expects a density matrix")
    _, flip, fhat = basis_operators(d)
    f = float(np.real(np.sum(flip.T * M)))
    fh = float(np.real(np.sum(fhat.T * M)))
    # clamp round-off so the result is a valid state
    f = min(f, 1.0)
    fh = min(max(fh, 0.0), d * (1 + f) / 2)
    return OOState(d, f, fh)


def classify(state: OOState) -> Region:
    """Region of the state space a point belongs to.

    ``tag`` is PPT, or A/B/C according to which optimal PPT witness family
    attains the relative entropy of entanglement.  ``subtag`` refines non-PPT
    points into additive_strong / additive_weak / AYCD / CYB.
    """
    from .measures import additivity_check, reep_witness

    d, f, fh = state.d, state.f, state.fhat
    if is_ppt(d, f, fh):
        return Region("PPT")
    tag, _ = reep_witness(state)
    if is_additive(d, f, fh):
        strong = additivity_check(state).level == "strong"
        return Region(tag, "additive_strong" if strong else "additive_weak")
    tol = get_config().tol_geo
    if fh <= cy_line(d, f) + tol:
        return Region(tag, "AYCD")
    return Region(tag, "CYB")


def sample_states(d, n, rng, region=None):
    """``n`` states uniform (by area) in the triangle, optionally restricted.

    ``region`` is a predicate ``(d, f, fhat) -> bool`` used for rejection.
    """
    out = []
    (ax, ay), (bx, by), (cx, cy) = (-1.0, 0.0), (1.0, 0.0), (1.0, float(d))
    while len(out) < n:
        r1, r2 = rng.random(2)
        q = math.sqrt(r1)
        f = (1 - q) * ax + q * (1 - r2) * bx + q * r2 * cx
        g = (1 - q) * ay + q * (1 - r2) * by + q * r2 * cy
        if region is None or region(d, f, g):
            out.append(OOState(d, f, g))
    return out


def triangle_grid(d, n):
    """n x n grid of the triangle: f uniform in [-1, 1], fhat uniform in [0, d(1+f)/2]."""
    for i in range(n):
        f = -1 + 2 * i / (n - 1)
        top = d * (1 + f) / 2
        for j in range(n):
            yield OOState(d, f, top * j / (n - 1))
