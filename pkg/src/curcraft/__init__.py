"""Deterministic CUR decomposition and row/column subset selection."""

__version__ = "0.1.0"

from .cur_polynomials import (
    GcurInstance,
    expected_poly_bruteforce,
    expected_poly_classical,
    expected_poly_rowsubset,
    f_poly_bruteforce,
    f_poly_classical_closed,
    p_sw,
)
from .polynomials import Poly, maxroot, minroot
from .selection import (
    bound_baseline,
    bound_th14,
    bound_th17,
    greedy_classical_cur,
    oracle_exhaustive,
    row_subset_select,
    tree_greedy_gcur,
)

__all__ = [
    "GcurInstance",
    "Poly",
    "bound_baseline",
    "bound_th14",
    "bound_th17",
    "expected_poly_bruteforce",
    "expected_poly_classical",
    "expected_poly_rowsubset",
    "f_poly_bruteforce",
    "f_poly_classical_closed",
    "greedy_classical_cur",
    "maxroot",
    "minroot",
    "oracle_exhaustive",
    "p_sw",
    "row_subset_select",
    "tree_greedy_gcur",
]
