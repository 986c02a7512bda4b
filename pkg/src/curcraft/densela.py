"""Dense real linear algebra on numpy arrays.

Index sets are sorted tuples of 0-based ints; ``None`` selects everything.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import IndexOutOfRange, NotSymmetric, PreconditionError, SingularCore, ZeroPivot
from .polynomials import Poly

EPS = np.finfo(float).eps
SYMMETRY_TOL = 1e-12
JACOBI_TOL = 1e-14

IndexSet = tuple


def index_set(indices: Sequence[int], bound: Optional[int] = None) -> tuple[int, ...]:
    out = tuple(int(i) for i in indices)
    if any(b <= a for a, b in zip(out, out[1:])):
        raise PreconditionError(f"index set must be strictly increasing: {out}")
    if bound is not None and out and (out[0] < 0 or out[-1] >= bound):
        raise IndexOutOfRange(f"index set {out} out of range for dimension {bound}")
    return out


def as_matrix(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[:, None]
    if M.ndim != 2:
        raise PreconditionError(f"expected a 2-d matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise PreconditionError("matrix entries must be finite")
    return M


def _check_bounds(idx, bound: int, what: str) -> None:
    for i in idx:
        if not 0 <= i < bound:
            raise IndexOutOfRange(f"{what} index {i} out of range for dimension {bound}")


def submatrix(M: np.ndarray, S=None, W=None) -> np.ndarray:
    rows = range(M.shape[0]) if S is None else tuple(S)
    cols = range(M.shape[1]) if W is None else tuple(W)
    _check_bounds(rows, M.shape[0], "row")
    _check_bounds(cols, M.shape[1], "column")
    return M[np.ix_(list(rows), list(cols))]


def det(M: np.ndarray) -> float:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise PreconditionError(f"det needs a square matrix, got {M.shape}")
    if M.shape[0] == 0:
        return 1.0
    return float(np.linalg.det(M))


def min_lu_pivot(M: np.ndarray) -> float:
    """Smallest |pivot| of partial-pivoted LU, 0 for singular input."""
    if M.shape[0] == 0:
        return np.inf
    _, _, u = scipy.linalg.lu(M)
    return float(np.min(np.abs(np.diag(u))))


def is_invertible(M: np.ndarray) -> bool:
    """Pivoted-LU test: smallest pivot above k * eps * ||M||_inf."""
    k = M.shape[0]
    if k == 0:
        return True
    norm = np.max(np.sum(np.abs(M), axis=1))
    if norm == 0:
        return False
    return min_lu_pivot(M) > k * EPS * norm


def numerical_rank(M: np.ndarray) -> int:
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.count_nonzero(sv > max(M.shape) * EPS * sv[0]))


@dataclass(frozen=True)
class SpectralFacts:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns, matching eigenvalues
    rank: int

    @property
    def spectral_norm_sq(self) -> float:
        return float(self.eigenvalues[0]) if self.eigenvalues.size else 0.0


def _check_symmetric(M: np.ndarray) -> None:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got {M.shape}")
    scale = np.max(np.abs(M), initial=0.0)
    if np.max(np.abs(M - M.T), initial=0.0) > SYMMETRY_TOL * max(scale, 1e-300):
        raise NotSymmetric("matrix is not symmetric within tolerance")


def jacobi_eigen(M: np.ndarray, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi rotations; returns (eigenvalues, eigenvectors) unsorted."""
    a = 0.5 * (M + M.T)
    n = a.shape[0]
    v = np.eye(n)
    target = JACOBI_TOL * np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :], a[q, :] = c * rp - s * rq, s * rp + c * rq
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p], a[:, q] = c * cp - s * cq, s * cp + c * cq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p], v[:, q] = c * vp - s * vq, s * vp + c * vq
    return np.diag(a).copy(), v


def sym_eigen(M: np.ndarray, method: str = "lapack") -> SpectralFacts:
    M = np.asarray(M, dtype=float)
    _check_symmetric(M)
    n = M.shape[0]
    if n == 0:
        return SpectralFacts(np.empty(0), np.empty((0, 0)), 0)
    if method == "lapack":
        w, v = np.linalg.eigh(0.5 * (M + M.T))
    elif method == "jacobi":
        w, v = jacobi_eigen(M)
    else:
        raise PreconditionError(f"unknown eigen method {method!r}")
    order = np.argsort(w)[::-1]
    w, v = w[order], v[:, order]
    top = np.max(np.abs(w))
    rank = int(np.count_nonzero(np.abs(w) > n * EPS * top)) if top > 0 else 0
    return SpectralFacts(w, v, rank)


def char_poly_sym(M: np.ndarray, psd: bool = False) -> Poly:
    """det[xI - M] as prod (x - lambda_i).

    With ``psd=True`` (Gram matrices) eigenvalues below rounding level are
    snapped to zero so that exact zero roots survive.
    """
    facts = sym_eigen(M)
    lam = facts.eigenvalues.copy()
    if psd and lam.size:
        lam[lam <= lam.size * EPS * max(lam[0], 0.0)] = 0.0
    return Poly.from_roots(lam)


def pinv(M: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return np.zeros(M.shape[::-1])
    u, sv, vt = np.linalg.svd(M, full_matrices=False)
    if tol is None:
        tol = max(M.shape) * EPS
    keep = sv > tol * sv[0] if sv[0] > 0 else np.zeros_like(sv, dtype=bool)
    inv = np.zeros_like(sv)
    inv[keep] = 1.0 / sv[keep]
    return (vt.T * inv) @ u.T


def residual(A, C, U, R, S, W) -> np.ndarray:
    """A - C[:, W] U[S, W]^{-1} R[S, :] via a linear solve."""
    S, W = tuple(S), tuple(W)
    if len(S) != len(W):
        raise PreconditionError(f"|S| = {len(S)} differs from |W| = {len(W)}")
    if not S:
        return np.array(A, dtype=float, copy=True)
    core = submatrix(U, S, W)
    if not is_invertible(core):
        raise SingularCore(f"U[S, W] is singular for S={S}, W={W}")
    return A - submatrix(C, None, W) @ np.linalg.solve(core, submatrix(R, S, None))


def rank_one_update(B: np.ndarray, i: int, j: int, pivot_tol: float = 0.0) -> np.ndarray:
    """B - B[:, j] B[i, :] / B[i, j], with row i and column j set to exactly 0."""
    _check_bounds((i,), B.shape[0], "row")
    _check_bounds((j,), B.shape[1], "column")
    piv = B[i, j]
    if abs(piv) <= pivot_tol or piv == 0.0:
        raise ZeroPivot(f"pivot B[{i}, {j}] = {piv!r}")
    out = B - np.outer(B[:, j], B[i, :]) / piv
    out[i, :] = 0.0
    out[:, j] = 0.0
    return out


def spectral_norm_sq(M: np.ndarray) -> float:
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    return max(sym_eigen(M.T @ M).spectral_norm_sq, 0.0)


def gram_eigenvalues(A: np.ndarray) -> np.ndarray:
    """Descending eigenvalues of A^T A, clipped at 0."""
    return np.maximum(sym_eigen(A.T @ A).eigenvalues, 0.0)


def best_rank_k_error_sq(A: np.ndarray, k: int) -> float:
    lam = gram_eigenvalues(A)
    if not 0 <= k <= min(A.shape):
        raise PreconditionError(f"need 0 <= k <= min(n, d), got k={k}")
    if k >= lam.size or k >= numerical_rank(A):
        return 0.0
    return float(lam[k])
