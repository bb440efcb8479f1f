"""Positivity of |sigma^T2|^T2 and a random search for binegative states."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import get_config
from .exceptions import DomainError
from .oo import OOState, pt_matrix, uvw_weights
from .operators import local_dim, partial_transpose

__all__ = [
    "BinegativityReport",
    "binegativity_defect",
    "random_state",
    "random_states",
    "random_pure_states",
    "search_binegative",
    "merge_reports",
    "oo_binegativity_coefficients",
    "schmidt_abs_pt",
    "matrix_to_json",
    "matrix_from_json",
]


@dataclass
class BinegativityReport:
    d: int
    defect: float
    samples_tested: int
    seed: int
    finds: int = 0
    worst_state: np.ndarray | None = field(default=None, repr=False)

    def to_json(self):
        return {
            "d": self.d,
            "defect": self.defect,
            "samples_tested": self.samples_tested,
            "finds": self.finds,
            "seed": self.seed,
            "worst_state": None if self.worst_state is None else matrix_to_json(self.worst_state),
        }


def matrix_to_json(M):
    M = np.asarray(M)
    return {"dim": int(M.shape[-1]), "real": M.real.tolist(), "imag": M.imag.tolist()}


def matrix_from_json(obj):
    return np.asarray(obj["real"], dtype=float) + 1j * np.asarray(obj["imag"], dtype=float)


def _abs_pt_pt(sigma):
    X = partial_transpose(sigma)
    X = (X + np.conj(np.swapaxes(X, -1, -2))) / 2
    w, v = np.linalg.eigh(X)
    A = (v * np.abs(w)[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))
    return partial_transpose(A)


def binegativity_defect(sigma, check: bool = True):
    """Smallest eigenvalue of |sigma^T2|^T2; negative means sigma is binegative.

    Accepts a single matrix or a stack ``(n, D, D)``.
    """
    sigma = np.asarray(sigma)
    local_dim(sigma)
    if check:
        tol = get_config().tol_psd
        tr = np.trace(sigma, axis1=-2, axis2=-1)
        herm = np.max(np.abs(sigma - np.conj(np.swapaxes(sigma, -1, -2))), initial=0.0)
        if herm > get_config().tol_herm or np.any(np.abs(tr - 1) > 1e-9):
            raise DomainError("binegativity_defect expects density matrices")
        if np.any(np.linalg.eigvalsh(sigma)[..., 0] < -tol):
            raise DomainError("binegativity_defect expects PSD input")
    B = _abs_pt_pt(sigma)
    B = (B + np.conj(np.swapaxes(B, -1, -2))) / 2
    out = np.linalg.eigvalsh(B)[..., 0]
    return float(out) if out.ndim == 0 else out


def random_states(rng, n, dim, rank):
    """``n`` density matrices from partial traces of Haar pure states on C^dim (x) C^rank."""
    G = rng.standard_normal((n, dim, rank)) + 1j * rng.standard_normal((n, dim, rank))
    rho = G @ np.conj(np.swapaxes(G, -1, -2))
    return rho / np.trace(rho, axis1=-2, axis2=-1).real[:, None, None]


def random_pure_states(rng, n, dim):
    psi = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
    return psi / np.linalg.norm(psi, axis=1, keepdims=True)


def random_state(dim: int, rank: int, seed: int) -> np.ndarray:
    if not 1 <= rank <= dim:
        raise DomainError(f"rank must lie in [1, {dim}]")
    rng = np.random.default_rng(seed)
    return random_states(rng, 1, dim, rank)[0]


def _shard(d, n, seed_seq, bias_boundary, batch, eps):
    D = d * d
    rng = np.random.default_rng(seed_seq)
    worst, worst_state, finds, done = math.inf, None, 0, 0
    thr = -get_config().binegative_threshold
    k = 0
    while done < n:
        m = min(batch, n - done)
        if bias_boundary:
            low = random_states(rng, m, D, math.ceil(D / 2))
            full = random_states(rng, m, D, D)
            rho = (1 - eps) * low + eps * full
        else:
            rho = random_states(rng, m, D, 1 + k % D)
        defects = binegativity_defect(rho, check=False)
        i = int(np.argmin(defects))
        if defects[i] < worst:
            worst, worst_state = float(defects[i]), rho[i].copy()
        finds += int(np.sum(defects < thr))
        done += m
        k += 1
    return worst, worst_state, finds, done


def search_binegative(
    d: int,
    n: int,
    seed: int | None = None,
    bias_boundary: bool = True,
    batch: int = 2000,
    shards: int = 1,
    workers: int = 1,
    eps: float = 1e-3,
) -> BinegativityReport:
    """Sample ``n`` random states and report the most negative defect.

    With ``bias_boundary`` states are mixtures of a rank ceil(d^2/2) state
    (weight 1-eps) with a full-rank one, i.e. close to the boundary of
    state space.  The sample stream depends only on (d, n, seed, shards).
    """
    if d < 2:
        raise DomainError("d must be >= 2")
    seed = get_config().seed if seed is None else seed
    children = np.random.SeedSequence(seed).spawn(shards)
    sizes = [n // shards + (1 if i < n % shards else 0) for i in range(shards)]
    jobs = [(d, m, c, bias_boundary, batch, eps) for m, c in zip(sizes, children)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda a: _shard(*a), jobs))
    else:
        parts = [_shard(*a) for a in jobs]
    reports = [BinegativityReport(d, w, m, seed, fnd, st) for w, st, fnd, m in parts]
    return merge_reports(reports)


def merge_reports(reports):
    reports = list(reports)
    best = min(reports, key=lambda r: r.defect)
    return BinegativityReport(
        best.d,
        best.defect,
        sum(r.samples_tested for r in reports),
        best.seed,
        sum(r.finds for r in reports),
        best.worst_state,
    )


def oo_binegativity_coefficients(state: OOState):
    """U, V, W weights of |sigma^T2|^T2 for an OO-invariant sigma."""
    M = pt_matrix(state.d).T
    pt_weights = M @ np.array(uvw_weights(state))
    return M @ np.abs(pt_weights)


def schmidt_abs_pt(psi, d):
    """sum_ij l_i l_j |u_i><u_i| (x) (|v_j><v_j|)^T from the Schmidt decomposition of psi."""
    u, lam, vh = np.linalg.svd(np.asarray(psi).reshape(d, d))
    out = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        Pu = np.outer(u[:, i], np.conj(u[:, i]))
        for j in range(d):
            v = vh[j]  # psi = sum_k lam_k u_k (x) v_k with v_k = vh[k]
            Pv_T = np.outer(v, np.conj(v)).T
            out += lam[i] * lam[j] * np.kron(Pu, Pv_T)
    return out
