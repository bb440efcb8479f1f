"""Dense operator algebra on a bipartite d x d space.

Operators are plain ``numpy`` arrays of shape ``(..., d*d, d*d)``; the local
dimension is inferred from the shape.  Most functions broadcast over leading
batch axes so that random searches can work on stacks of matrices.
"""
from __future__ import annotations

import math

import numpy as np

from .config import get_config, nats_to
from .exceptions import DomainError, StructureError

__all__ = [
    "local_dim",
    "check_hermitian",
    "partial_transpose",
    "operator_abs",
    "trace_norm",
    "trace_norm_pt",
    "is_psd",
    "relative_entropy",
]


def local_dim(M) -> int:
    """Return d for an operator acting on C^d (x) C^d."""
    M = np.asarray(M)
    if M.ndim < 2 or M.shape[-1] != M.shape[-2]:
        raise StructureError(f"expected square matrices, got shape {M.shape}")
    n = M.shape[-1]
    d = math.isqrt(n)
    if d * d != n:
        raise StructureError(f"dimension {n} is not a perfect square")
    if d < 2:
        raise StructureError("local dimension must be at least 2")
    return d


def check_hermitian(M, tol: float | None = None) -> np.ndarray:
    M = np.asarray(M)
    local_dim(M)
    tol = get_config().tol_herm if tol is None else tol
    dev = np.max(np.abs(M - np.conj(np.swapaxes(M, -1, -2))), initial=0.0)
    if dev > tol:
        raise DomainError(f"matrix is not Hermitian (deviation {dev:.3g})")
    return M


def partial_transpose(M) -> np.ndarray:
    """Transpose on the second tensor factor."""
    M = np.asarray(M)
    d = local_dim(M)
    batch = M.shape[:-2]
    T = M.reshape(batch + (d, d, d, d))
    # axes: (i, j, k, l) = <i j| M |k l>; swap j <-> l
    nb = len(batch)
    axes = list(range(nb)) + [nb, nb + 3, nb + 2, nb + 1]
    return T.transpose(axes).reshape(M.shape)


def _eigh(M):
    w, v = np.linalg.eigh(M)
    return w, v


def operator_abs(M) -> np.ndarray:
    """|M| = M_+ + M_- from the spectral decomposition."""
    M = check_hermitian(M)
    w, v = _eigh(M)
    return (v * np.abs(w)[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def trace_norm(M) -> np.ndarray | float:
    M = check_hermitian(M)
    out = np.abs(np.linalg.eigvalsh(M)).sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def trace_norm_pt(M) -> np.ndarray | float:
    """Tr|M^T2|; equal to 1 exactly for PPT states."""
    return trace_norm(partial_transpose(M))


def is_psd(M, tol: float | None = None) -> bool | np.ndarray:
    tol = get_config().tol_psd if tol is None else tol
    M = check_hermitian(M)
    out = np.linalg.eigvalsh(M)[..., 0] >= -tol
    return bool(out) if np.ndim(out) == 0 else out


def _xlogx(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log(x[pos])
    return out


def relative_entropy(rho, tau, base: float | None = None) -> float:
    """S(rho||tau) = Tr rho log rho - Tr rho log tau.

    ``tau`` may be subnormalised.  Returns ``inf`` when the support of
    ``rho`` is not contained in the support of ``tau``.
    """
    cfg = get_config()
    rho = check_hermitian(rho)
    tau = check_hermitian(tau)
    if rho.shape != tau.shape:
        raise StructureError(f"shape mismatch {rho.shape} vs {tau.shape}")
    lr, vr = _eigh(rho)
    lt, vt = _eigh(tau)
    if lr[0] < -cfg.tol_psd or lt[0] < -cfg.tol_psd:
        raise DomainError("relative entropy needs PSD arguments")
    lr = np.where(lr > cfg.tol_supp, lr, 0.0)
    # overlaps[i, j] = |<r_i|t_j>|^2
    overlaps = np.abs(np.conj(vr).T @ vt) ** 2
    weight_on_t = lr @ overlaps  # <t_j| rho |t_j>
    null = lt <= cfg.tol_supp
    if np.any(weight_on_t[null] > cfg.tol_supp):
        return math.inf
    log_t = np.log(np.where(null, 1.0, lt))
    value = float(_xlogx(lr).sum() - weight_on_t[~null] @ log_t[~null])
    return nats_to(value, base)
