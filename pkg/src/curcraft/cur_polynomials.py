"""Characteristic polynomials attached to CUR-type selections.

For a selection (S, W) of k rows of U/R and k columns of C/U, ``p_sw`` is the
polynomial det[U_SW]^2 det[xI + B^T B] (B the CUR residual) whenever U_SW is
invertible, extended to singular cores through a bordered determinant. The
expected polynomial sums p_sw over all selections; node polynomials sum it over
the selections extending a partial one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from . import densela as la
from .errors import (
    EnumerationCapExceeded,
    PreconditionError,
    RankDeficientC,
    RankTooSmall,
    ShapeMismatch,
    SingularCore,
)
from .polynomials import Poly, dk_xk_apply, flip, laguerre_flip_apply

ENUMERATION_CAP = 200_000
ZERO_POLY_TOL = 1e-10

KINDS = ("general", "classical", "row-subset")


@dataclass(frozen=True)
class GcurInstance:
    """Source matrices A (n x d), C (n x dc), U (nr x dc), R (nr x d) and size k."""

    A: np.ndarray
    C: np.ndarray
    U: np.ndarray
    R: np.ndarray
    k: int
    kind: str = "general"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PreconditionError(f"unknown instance kind {self.kind!r}")
        n, d = self.A.shape
        if self.C.shape[0] != n:
            raise ShapeMismatch(f"C has {self.C.shape[0]} rows, A has {n}")
        if self.R.shape[1] != d:
            raise ShapeMismatch(f"R has {self.R.shape[1]} columns, A has {d}")
        if self.U.shape != (self.R.shape[0], self.C.shape[1]):
            raise ShapeMismatch(
                f"U has shape {self.U.shape}, expected {(self.R.shape[0], self.C.shape[1])}"
            )
        if self.k < 1:
            raise PreconditionError("k must be at least 1")
        if self.k > min(self.U.shape) or self.k > la.numerical_rank(self.U):
            raise RankTooSmall(f"k = {self.k} exceeds rank(U) = {la.numerical_rank(self.U)}")

    @classmethod
    def general(cls, A, C, U, R, k: int) -> "GcurInstance":
        return cls(la.as_matrix(A), la.as_matrix(C), la.as_matrix(U), la.as_matrix(R), int(k))

    @classmethod
    def classical(cls, A, k: int) -> "GcurInstance":
        A = la.as_matrix(A)
        return cls(A, A, A, A, int(k), "classical")

    @classmethod
    def row_subset(cls, A, C) -> "GcurInstance":
        A, C = la.as_matrix(A), la.as_matrix(C)
        k = C.shape[1]
        if la.numerical_rank(C) < k:
            raise RankDeficientC(f"C has {k} columns but rank {la.numerical_rank(C)}")
        return cls(A, C, C, A, k, "row-subset")

    @property
    def n_rows(self) -> int:
        return self.U.shape[0]

    @property
    def n_cols(self) -> int:
        return self.U.shape[1]

    @property
    def d(self) -> int:
        return self.A.shape[1]

    def scaled(self, s: float) -> "GcurInstance":
        """Instance with A (and its aliases) divided by s.

        Residuals scale by 1/s, so residual norms and P_k roots scale by 1/s^2.
        """
        if self.kind == "classical":
            return GcurInstance.classical(self.A / s, self.k)
        return GcurInstance(self.A / s, self.C, self.U, self.R / s, self.k, self.kind)

    def pair_count(self) -> int:
        return math.comb(self.n_rows, self.k) * math.comb(self.n_cols, self.k)


@dataclass(frozen=True)
class NodePoly:
    s_tilde: tuple
    w_tilde: tuple
    poly: Poly  # in x, nonnegative leading coefficient
    degree_is_full: bool


# ---------------------------------------------------------------------------
# p_{S,W}


def shifted_gram_poly(B: np.ndarray, scale: float = 1.0) -> Poly:
    """scale * det[xI + B^T B]."""
    lam = la.char_poly_sym(B.T @ B, psd=True)
    return lam.reflect() * (scale * (-1) ** B.shape[1])


def bordered_matrix(inst: GcurInstance, S, W, x: float) -> np.ndarray:
    A, n, d, k = inst.A, inst.A.shape[0], inst.d, len(S)
    CW = la.submatrix(inst.C, None, W)
    USW = la.submatrix(inst.U, S, W)
    RS = la.submatrix(inst.R, S, None)
    size = n + 2 * k + d
    M = np.zeros((size, size))
    a, b, c = n, n + k, n + 2 * k
    M[:a, :a] = np.eye(n)
    M[:a, b:c] = CW
    M[:a, c:] = A
    M[a:b, b:c] = USW
    M[a:b, c:] = RS
    M[b:c, :a] = CW.T
    M[b:c, a:b] = USW.T
    M[c:, :a] = A.T
    M[c:, a:b] = RS.T
    M[c:, c:] = -x * np.eye(d)
    return M


def _sign_corrected_det(inst, S, W, x):
    return (-1) ** (inst.d - len(S)) * la.det(bordered_matrix(inst, S, W, x))


def p_sw_determinant(inst: GcurInstance, S, W, degree: Optional[int] = None) -> Poly:
    """p_sw from the bordered determinant, sampled and interpolated.

    ``degree`` caps the interpolant (known from the rank of U_SW); higher
    coefficients are interpolation noise.
    """
    d = inst.d
    norms = [la.spectral_norm_sq(M) for M in (inst.A, inst.C, inst.U, inst.R)]
    span = 4.0 * max(norms[0], math.sqrt(norms[1] * norms[3]), 1.0)
    nodes = np.cos(np.pi * (np.arange(d + 1) + 0.5) / (d + 1))
    xs = -span + (nodes + 1.0) * 0.5 * (span + 1.0)
    vals = np.array([_sign_corrected_det(inst, S, W, x) for x in xs])
    # Hadamard bound at the widest node is the natural magnitude reference
    ref = np.prod(np.maximum(np.linalg.norm(bordered_matrix(inst, S, W, -span), axis=1), 1e-300))
    if np.max(np.abs(vals)) <= ZERO_POLY_TOL * ref:
        return Poly()
    fit = np.polynomial.Polynomial.fit(xs, vals, d).convert().coef
    coeffs = np.zeros(d + 1)
    coeffs[: fit.size] = fit
    if degree is not None:
        coeffs[degree + 1 :] = 0.0
    return Poly(coeffs)


def p_sw(inst: GcurInstance, S, W) -> Poly:
    S, W = la.index_set(S, inst.n_rows), la.index_set(W, inst.n_cols)
    k = len(S)
    if len(W) != k:
        raise PreconditionError(f"|S| = {k} differs from |W| = {len(W)}")
    USW = la.submatrix(inst.U, S, W)
    if la.is_invertible(USW):
        B = la.residual(inst.A, inst.C, inst.U, inst.R, S, W)
        return shifted_gram_poly(B, la.det(USW) ** 2)
    CW = la.submatrix(inst.C, None, W)
    RS = la.submatrix(inst.R, S, None)
    if la.numerical_rank(np.vstack([CW, USW])) < k or la.numerical_rank(np.hstack([USW, RS])) < k:
        return Poly()
    return p_sw_determinant(inst, S, W, inst.d - k + la.numerical_rank(USW))


# ---------------------------------------------------------------------------
# expected polynomial


def expected_poly_classical(A, k: int) -> Poly:
    """P_k(-x) for C = U = R = A, via the Laguerre closed form."""
    A = la.as_matrix(A)
    d = A.shape[1]
    rank = la.numerical_rank(A)
    if k < 0 or k > rank:
        raise RankTooSmall(f"k = {k} exceeds rank(A) = {rank}")
    char = la.char_poly_sym(A.T @ A, psd=True)
    return laguerre_flip_apply(char, d, k, normalized=True) * ((-1) ** (d - k))


def projection_residual(A, C) -> np.ndarray:
    """(I - C C^+) A."""
    return A - C @ (la.pinv(C) @ A)


def expected_poly_rowsubset(A, C) -> Poly:
    """P_k(-x) for U = C (n x k, full column rank), R = A, W = all columns."""
    A, C = la.as_matrix(A), la.as_matrix(C)
    d, k = A.shape[1], C.shape[1]
    if la.numerical_rank(C) < k:
        raise RankDeficientC(f"C has {k} columns but rank {la.numerical_rank(C)}")
    P = projection_residual(A, C)
    char = la.char_poly_sym(P.T @ P, psd=True)
    core = flip(dk_xk_apply(flip(char, d), k), d)
    return core * ((-1) ** d * la.det(C.T @ C) / math.factorial(k))


def _check_cap(count: int, cap: int) -> None:
    if count > cap:
        raise EnumerationCapExceeded(f"{count} selections exceed the enumeration cap {cap}")


def all_selections(inst: GcurInstance):
    """(S, W) pairs in ascending lexicographic order."""
    cols = list(combinations(range(inst.n_cols), inst.k))
    if inst.kind == "row-subset":
        cols = [tuple(range(inst.k))]
    for S in combinations(range(inst.n_rows), inst.k):
        for W in cols:
            yield S, W


def selection_count(inst: GcurInstance) -> int:
    if inst.kind == "row-subset":
        return math.comb(inst.n_rows, inst.k)
    return inst.pair_count()


@dataclass
class SelectionTable:
    """Every p_sw of an instance, computed once, in lexicographic order."""

    inst: GcurInstance
    polys: dict = field(default_factory=dict)
    invertible: dict = field(default_factory=dict)

    @classmethod
    def build(cls, inst: GcurInstance, cap: int = ENUMERATION_CAP) -> "SelectionTable":
        _check_cap(selection_count(inst), cap)
        table = cls(inst)
        for S, W in all_selections(inst):
            table.polys[S, W] = p_sw(inst, S, W)
            table.invertible[S, W] = la.is_invertible(la.submatrix(inst.U, S, W))
        return table

    def node(self, s_tilde=(), w_tilde=()) -> NodePoly:
        s_set, w_set = set(s_tilde), set(w_tilde)
        total = Poly()
        full = False
        for (S, W), p in self.polys.items():
            if s_set <= set(S) and w_set <= set(W):
                total = total + p
                full = full or self.invertible[S, W]
        return NodePoly(tuple(s_tilde), tuple(w_tilde), total, full)


def expected_poly_bruteforce(inst: GcurInstance, cap: int = ENUMERATION_CAP) -> Poly:
    """P_k(x) as the literal sum of p_sw over all selections."""
    return SelectionTable.build(inst, cap).node().poly


def f_poly_bruteforce(
    inst: GcurInstance, s_tilde=(), w_tilde=(), cap: int = ENUMERATION_CAP,
    table: Optional[SelectionTable] = None,
) -> NodePoly:
    s_tilde = la.index_set(s_tilde, inst.n_rows)
    w_tilde = la.index_set(w_tilde, inst.n_cols)
    if len(s_tilde) > inst.k or len(w_tilde) > inst.k:
        raise PreconditionError("partial selection larger than k")
    if table is None:
        table = SelectionTable.build(inst, cap)
    return table.node(s_tilde, w_tilde)


def f_poly_classical_closed(A, k: int, s_tilde=(), w_tilde=()) -> NodePoly:
    """Node polynomial for C = U = R = A with an invertible partial core."""
    A = la.as_matrix(A)
    d = A.shape[1]
    s_tilde = la.index_set(s_tilde, A.shape[0])
    w_tilde = la.index_set(w_tilde, d)
    level = len(s_tilde)
    if len(w_tilde) != level or level > k:
        raise PreconditionError("need |S~| = |W~| <= k")
    core = la.submatrix(A, s_tilde, w_tilde)
    if not la.is_invertible(core):
        raise SingularCore(f"A[S~, W~] is singular for {s_tilde}, {w_tilde}")
    B = la.residual(A, A, A, A, s_tilde, w_tilde)
    char = la.char_poly_sym(B.T @ B, psd=True)
    sign = (-1) ** (d - k + level)
    reflected = laguerre_flip_apply(char, d, k - level, normalized=True) * (sign * la.det(core) ** 2)
    poly = reflected.reflect()
    return NodePoly(s_tilde, w_tilde, poly, poly.degree == d)
