"""Subset selection algorithms and the error bounds they are compared against.

All selectors work on a copy of the input rescaled to unit spectral norm and
report residuals, scores and roots back in the original units.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import densela as la
from .cur_polynomials import (
    GcurInstance,
    SelectionTable,
    all_selections,
    expected_poly_classical,
    expected_poly_rowsubset,
    f_poly_classical_closed,
    projection_residual,
    selection_count,
    ENUMERATION_CAP,
)
from .errors import (
    AllPivotsZero,
    EnumerationCapExceeded,
    NoFullDegreeChild,
    NoInvertiblePair,
    PreconditionError,
    RankDeficientC,
    RankTooSmall,
)
from .polynomials import DEFAULT_EPS, laguerre_flip_apply, maxroot, minroot

ALGORITHMS = ("greedy-classical", "tree-greedy", "row-subset", "oracle")


@dataclass(frozen=True)
class BoundValue:
    """A bound, or the reason it does not apply."""

    value: Optional[float] = None
    reason: Optional[str] = None

    @property
    def present(self) -> bool:
        return self.value is not None

    def as_dict(self) -> dict:
        return {"value": self.value} if self.present else {"reason": self.reason}


@dataclass(frozen=True)
class TraceStep:
    step: int
    row: Optional[int]
    col: Optional[int]
    score: float
    candidates: int


@dataclass
class SelectionReport:
    s_hat: list
    w_hat: list
    residual_norm_sq: float
    pk_maxroot: float
    eps: float
    algorithm: str
    bound_th14: Optional[BoundValue] = None
    bound_th17: Optional[BoundValue] = None
    bound_baseline: Optional[BoundValue] = None
    trace: list = field(default_factory=list)


def _norm_scale(A: np.ndarray) -> float:
    s = math.sqrt(la.spectral_norm_sq(A))
    return s if s > 0 else 1.0


def _residual_sq(inst: GcurInstance, S, W) -> float:
    return la.spectral_norm_sq(la.residual(inst.A, inst.C, inst.U, inst.R, S, W))


# ---------------------------------------------------------------------------
# greedy for C = U = R = A


def _score_row(B, G, i, order, d, eps, pivot_tol):
    """Best (score, i, j) over the candidates in row i, plus the candidate count."""
    best = None
    count = 0
    b_i = B[i, :]
    for j in range(B.shape[1]):
        beta = B[i, j]
        if abs(beta) <= pivot_tol:
            continue
        g_j = G[:, j]
        M = G - (np.outer(g_j, b_i) + np.outer(b_i, g_j)) / beta + (G[j, j] / beta**2) * np.outer(b_i, b_i)
        M = 0.5 * (M + M.T)
        q = laguerre_flip_apply(la.char_poly_sym(M, psd=True), d, order, normalized=True)
        if q.is_zero:
            continue
        count += 1
        score = maxroot(q, eps)
        if best is None or (score, i, j) < best[0]:
            best = ((score, i, j), M)
    return best, count


def greedy_classical_cur(A, k: int, eps: float = DEFAULT_EPS, threads: int = 1) -> SelectionReport:
    """Pick k rows and k columns greedily, each step minimizing the largest root
    of the Laguerre-transformed characteristic polynomial of the next residual.

    Guarantees residual^2 <= maxroot P_k(-x) + 2 k eps.
    """
    A = la.as_matrix(A)
    n, d = A.shape
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    rank = la.numerical_rank(A)
    if not 1 <= k <= rank:
        raise RankTooSmall(f"need 1 <= k <= rank(A) = {rank}, got {k}")
    s = _norm_scale(A)
    eps_n = eps / s**2
    B = A / s
    G = B.T @ B
    pivot_tol = max(n, d) * la.EPS
    rows, cols, trace = [], [], []
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for step in range(1, k + 1):
            order = k - step
            args = [(B, G, i, order, d, eps_n, pivot_tol) for i in range(n)]
            if pool is None:
                results = [_score_row(*a) for a in args]
            else:
                results = list(pool.map(lambda a: _score_row(*a), args))
            best = None
            total = 0
            for res, count in results:  # fixed row order keeps the reduction deterministic
                total += count
                if res is not None and (best is None or res[0] < best[0]):
                    best = res
            if best is None:
                raise AllPivotsZero(f"no admissible pivot at step {step}")
            (score, i, j), M = best
            B = la.rank_one_update(B, i, j)
            G = M
            rows.append(i)
            cols.append(j)
            trace.append(TraceStep(step, i, j, score * s**2, total))
    finally:
        if pool is not None:
            pool.shutdown()
    inst = GcurInstance.classical(A, k)
    pk = maxroot(expected_poly_classical(A / s, k), eps_n) * s**2
    return SelectionReport(
        s_hat=rows,
        w_hat=cols,
        residual_norm_sq=_residual_sq(inst, rows, cols),
        pk_maxroot=pk,
        eps=eps,
        algorithm="greedy-classical",
        bound_th14=bound_th14(A, k),
        bound_baseline=bound_baseline(A, k),
        trace=trace,
    )


# ---------------------------------------------------------------------------
# tree greedy for general instances


class _NodeSource:
    """Node polynomials of a normalized instance; closed form where it applies."""

    def __init__(self, inst: GcurInstance, cap: int):
        self.inst = inst
        self.table = SelectionTable.build(inst, cap)

    def node(self, s_tilde, w_tilde):
        inst = self.inst
        if inst.kind == "classical" and len(s_tilde) == len(w_tilde):
            core = la.submatrix(inst.A, s_tilde, w_tilde)
            if la.is_invertible(core):
                return f_poly_classical_closed(inst.A, inst.k, s_tilde, w_tilde)
        return self.table.node(s_tilde, w_tilde)


def _pick_child(source, s_tilde, w_tilde, grow_rows: bool, bound: int, eps: float):
    taken = s_tilde if grow_rows else w_tilde
    best, count = None, 0
    for idx in range(bound):
        if idx in taken:
            continue
        if grow_rows:
            child = source.node(tuple(sorted(s_tilde + [idx])), tuple(sorted(w_tilde)))
        else:
            child = source.node(tuple(sorted(s_tilde)), tuple(sorted(w_tilde + [idx])))
        if not child.degree_is_full:
            continue
        count += 1
        score = minroot(child.poly, eps)
        # ties within eps keep the lower index
        if best is None or score > best[0] + eps:
            best = (score, idx)
    if best is None:
        raise NoFullDegreeChild(f"no full-degree child at S~={s_tilde}, W~={w_tilde}")
    return best, count


def pk_maxroot(inst: GcurInstance, eps: float = DEFAULT_EPS, table: Optional[SelectionTable] = None,
               cap: int = ENUMERATION_CAP) -> float:
    """maxroot P_k(-x), with closed forms for the classical and row-subset cases."""
    s = _norm_scale(inst.A)
    norm = inst.scaled(s)
    if inst.kind == "classical":
        root = maxroot(expected_poly_classical(norm.A, inst.k), eps / s**2)
    elif inst.kind == "row-subset":
        root = maxroot(expected_poly_rowsubset(norm.A, norm.C), eps / s**2)
    else:
        table = table or SelectionTable.build(norm, cap)
        root = -minroot(table.node().poly, eps / s**2)
    return root * s**2


def tree_greedy_gcur(inst: GcurInstance, eps: float = DEFAULT_EPS, cap: int = ENUMERATION_CAP) -> SelectionReport:
    """Grow the row set, then the column set, each time keeping the child node
    polynomial with the largest smallest root among full-degree children.

    Guarantees residual^2 <= maxroot P_k(-x).
    """
    s = _norm_scale(inst.A)
    eps_n = eps / s**2
    norm = inst.scaled(s)
    source = _NodeSource(norm, cap)
    rows: list = []
    cols: list = list(range(inst.k)) if inst.kind == "row-subset" else []
    trace = []
    for step in range(1, inst.k + 1):
        (score, i), count = _pick_child(source, rows, cols, True, inst.n_rows, eps_n)
        rows.append(i)
        trace.append(TraceStep(step, i, None, score * s**2, count))
        if inst.kind != "row-subset":
            (score, j), count = _pick_child(source, rows, cols, False, inst.n_cols, eps_n)
            cols.append(j)
            trace.append(TraceStep(step, None, j, score * s**2, count))
    report = SelectionReport(
        s_hat=rows,
        w_hat=cols,
        residual_norm_sq=_residual_sq(inst, rows, cols),
        pk_maxroot=pk_maxroot(inst, eps, source.table),
        eps=eps,
        algorithm="row-subset" if inst.kind == "row-subset" else "tree-greedy",
        trace=trace,
    )
    _attach_bounds(report, inst)
    return report


def row_subset_select(A, C, eps: float = DEFAULT_EPS, cap: int = ENUMERATION_CAP) -> SelectionReport:
    """Choose k rows S so that A - C (C_S)^{-1} A_S is small, C being n x k."""
    return tree_greedy_gcur(GcurInstance.row_subset(A, C), eps, cap)


def oracle_exhaustive(inst: GcurInstance, eps: float = DEFAULT_EPS, cap: int = ENUMERATION_CAP) -> SelectionReport:
    """Global minimizer of the residual over all invertible selections."""
    if selection_count(inst) > cap:
        raise EnumerationCapExceeded(f"{selection_count(inst)} selections exceed the cap {cap}")
    best = None
    for S, W in all_selections(inst):
        if not la.is_invertible(la.submatrix(inst.U, S, W)):
            continue
        value = _residual_sq(inst, S, W)
        if best is None or value < best[0]:
            best = (value, S, W)
    if best is None:
        raise NoInvertiblePair("no selection has an invertible core")
    value, S, W = best
    report = SelectionReport(
        s_hat=list(S),
        w_hat=list(W),
        residual_norm_sq=value,
        pk_maxroot=pk_maxroot(inst, eps, cap=cap),
        eps=eps,
        algorithm="oracle",
    )
    _attach_bounds(report, inst)
    return report


def _attach_bounds(report: SelectionReport, inst: GcurInstance) -> None:
    if inst.kind == "classical":
        report.bound_th14 = bound_th14(inst.A, inst.k)
        report.bound_baseline = bound_baseline(inst.A, inst.k)
    elif inst.kind == "row-subset":
        report.bound_th17 = BoundValue(bound_th17(inst.A, inst.C))


# ---------------------------------------------------------------------------
# bounds


@dataclass(frozen=True)
class BoundInputs:
    t: int
    lambdas: np.ndarray  # descending eigenvalues of A^T A, normalized to lambda_1 = 1
    scale_sq: float
    alpha_k: Optional[float] = None


def spectral_alpha(lambdas: np.ndarray, k: int) -> float:
    """(1/l_{k+1} - mean(1/l_1..1/l_k)) / (1/l_{k+1} - 1) for lambda_1 = 1."""
    inv_next = 1.0 / lambdas[k]
    return float((inv_next - np.mean(1.0 / lambdas[:k])) / (inv_next - 1.0))


def bound_inputs(A, k: int) -> BoundInputs:
    A = la.as_matrix(A)
    lam = la.gram_eigenvalues(A)
    scale = lam[0] if lam.size and lam[0] > 0 else 1.0
    return BoundInputs(la.numerical_rank(A), lam / scale, float(scale))


def bound_th14(A, k: int) -> BoundValue:
    """(t-k+1) t / (1 - sqrt(alpha_k))^2 * lambda_{k+1}, or why it does not apply."""
    inputs = bound_inputs(A, k)
    t, lam = inputs.t, inputs.lambdas
    if not 2 <= k <= t - 1:
        return BoundValue(reason=f"hypothesis 2 <= k <= t-1 fails (k={k}, t={t})")
    if not lam[0] - lam[k - 1] > t * la.EPS:
        return BoundValue(reason="hypothesis lambda_1 > lambda_k fails")
    alpha = spectral_alpha(lam, k)
    if not 0.0 < alpha < 1.0:
        return BoundValue(reason=f"alpha_k = {alpha!r} outside (0, 1)")
    value = (t - k + 1) * t / (1.0 - math.sqrt(alpha)) ** 2 * lam[k]
    return BoundValue(float(value * inputs.scale_sq))


def bound_th17(A, C) -> float:
    """(1 + k r) ||A - C C^+ A||^2 with r the rank of the projection residual."""
    A, C = la.as_matrix(A), la.as_matrix(C)
    k = C.shape[1]
    if la.numerical_rank(C) < k:
        raise RankDeficientC(f"C has {k} columns but rank {la.numerical_rank(C)}")
    P = projection_residual(A, C)
    sv = np.linalg.svd(P, compute_uv=False)
    top = math.sqrt(la.spectral_norm_sq(A))
    r = int(np.count_nonzero(sv > max(A.shape) * la.EPS * top)) if top > 0 else 0
    if r == 0:
        return 0.0
    return float((1 + k * r) * sv[0] ** 2)


def bound_baseline(A, k: int) -> BoundValue:
    """(k+1)^2 (t-k) ||A - A_k||^2."""
    A = la.as_matrix(A)
    t = la.numerical_rank(A)
    if k > t:
        return BoundValue(reason=f"k={k} exceeds rank t={t}")
    return BoundValue(float((k + 1) ** 2 * (t - k) * la.best_rank_k_error_sq(A, k)))
