"""Univariate real polynomials and the root machinery used by the selectors.

Coefficients are stored in ascending order: ``coeffs[i]`` multiplies ``x**i``.
Root queries go through Sturm chains with bisection; companion-matrix
eigenvalues are the fallback when a floating-point chain degenerates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateChain,
    DegreeExceedsFlipOrder,
    DegreeMismatch,
    NotRealRooted,
    PrecondViolated,
    PreconditionError,
    ZeroPolynomialRoot,
)

TRIM_TOL = 1e-12
CHAIN_TRUNC_TOL = 1e-12
CHAIN_TRUNC_LADDER = (CHAIN_TRUNC_TOL, 1e-9, 1e-6)
FALLBACK_IMAG_TOL = 1e-4
DEFAULT_EPS = 1e-9
IMAG_TOL = 1e-8
ZERO_DEGREE = -1


class Poly:
    """Dense real polynomial, ascending coefficients, immutable.

    Trailing (highest-power) coefficients with ``|c| <= trim_tol * max|c|``
    are dropped on construction. The zero polynomial has no coefficients and
    degree ``ZERO_DEGREE`` (-1).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[float] | np.ndarray = (), trim_tol: float = TRIM_TOL):
        c = np.array(coeffs, dtype=float).ravel()
        if c.size and not np.all(np.isfinite(c)):
            raise PreconditionError("polynomial coefficients must be finite")
        if c.size:
            scale = np.max(np.abs(c))
            cut = trim_tol * scale
            n = c.size
            while n and abs(c[n - 1]) <= cut:
                n -= 1
            c = c[:n].copy()
        c.flags.writeable = False
        self.coeffs = c

    @classmethod
    def from_roots(cls, roots: Sequence[float], lead: float = 1.0) -> "Poly":
        c = np.array([lead], dtype=float)
        for r in roots:
            c = np.concatenate(([0.0], c)) - r * np.concatenate((c, [0.0]))
        return cls(c, trim_tol=0.0)

    @classmethod
    def monomial(cls, power: int, coeff: float = 1.0) -> "Poly":
        c = np.zeros(power + 1)
        c[power] = coeff
        return cls(c, trim_tol=0.0)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1 if self.coeffs.size else ZERO_DEGREE

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    @property
    def lead(self) -> float:
        return float(self.coeffs[-1]) if self.coeffs.size else 0.0

    def padded(self, d: int) -> np.ndarray:
        """Coefficient vector of length ``d + 1``."""
        if self.degree > d:
            raise DegreeExceedsFlipOrder(f"degree {self.degree} exceeds frame {d}")
        out = np.zeros(d + 1)
        out[: self.coeffs.size] = self.coeffs
        return out

    def __call__(self, x):
        # Horner
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for c in self.coeffs[::-1]:
            acc = acc * x + c
        return acc if acc.ndim else float(acc)

    def reflect(self) -> "Poly":
        """p(-x)."""
        signs = np.where(np.arange(self.coeffs.size) % 2, -1.0, 1.0)
        return Poly(self.coeffs * signs, trim_tol=0.0)

    def scale_var(self, s: float) -> "Poly":
        """p(s*x)."""
        return Poly(self.coeffs * s ** np.arange(self.coeffs.size), trim_tol=0.0)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly([float(other)], trim_tol=0.0)

    def __add__(self, other):
        other = self._coerce(other)
        n = max(self.coeffs.size, other.coeffs.size)
        c = np.zeros(n)
        c[: self.coeffs.size] += self.coeffs
        c[: other.coeffs.size] += other.coeffs
        return Poly(c, trim_tol=0.0)

    __radd__ = __add__

    def __neg__(self):
        return Poly(-self.coeffs, trim_tol=0.0)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, Poly):
            if self.is_zero or other.is_zero:
                return Poly()
            return Poly(np.convolve(self.coeffs, other.coeffs), trim_tol=0.0)
        return Poly(self.coeffs * float(other), trim_tol=0.0)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float):
        return Poly(self.coeffs / float(scalar), trim_tol=0.0)

    def allclose(self, other: "Poly", rtol: float = 1e-10, atol: float = 0.0) -> bool:
        n = max(self.coeffs.size, other.coeffs.size)
        a, b = np.zeros(n), np.zeros(n)
        a[: self.coeffs.size] = self.coeffs
        b[: other.coeffs.size] = other.coeffs
        scale = max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0))
        return bool(np.all(np.abs(a - b) <= atol + rtol * scale))

    def __repr__(self):
        return f"Poly({np.array2string(self.coeffs, precision=6, separator=', ')})"


# ---------------------------------------------------------------------------
# operators


def derivative(p: Poly, m: int = 1) -> Poly:
    if m < 0:
        raise PreconditionError("derivative order must be nonnegative")
    c = p.coeffs
    if m == 0:
        return p
    if m > p.degree:
        return Poly()
    idx = np.arange(m, c.size)
    factors = np.array([math.perm(int(i), m) for i in idx], dtype=float)
    return Poly(c[m:] * factors, trim_tol=0.0)


def flip(p: Poly, d: int) -> Poly:
    """x**d * p(1/x): pad to the degree-d frame and reverse."""
    return Poly(p.padded(d)[::-1], trim_tol=0.0)


def laguerre_flip_apply(p: Poly, d: int, k: int, normalized: bool = False) -> Poly:
    """Flip, k-fold Laguerre derivative (d/dx x d/dx), flip back, in closed form.

    Coefficient ``c_i`` is scaled by ``((d-i)!/(d-i-k)!)**2`` and shifted up by
    ``k``. With ``normalized=True`` the factors are divided by ``(k!)**2``,
    i.e. become ``binom(d-i, k)**2``.
    """
    if not 0 <= k <= d:
        raise PreconditionError(f"need 0 <= k <= d, got k={k}, d={d}")
    c = p.padded(d)
    out = np.zeros(d + 1)
    for i in range(d - k + 1):
        if c[i] == 0.0:
            continue
        f = math.comb(d - i, k) if normalized else math.perm(d - i, k)
        out[i + k] = float(f * f) * c[i]
    return Poly(out, trim_tol=0.0)


def dk_xk_apply(p: Poly, k: int) -> Poly:
    """d^k/dx^k (x^k p(x)); the x^m coefficient picks up (m+k)!/m!."""
    if k < 0:
        raise PreconditionError("order must be nonnegative")
    c = p.coeffs
    factors = np.array([math.perm(m + k, k) for m in range(c.size)], dtype=float)
    return Poly(c * factors, trim_tol=0.0)


def mult_convolution(p: Poly, q: Poly, d: int) -> Poly:
    """Symmetric multiplicative convolution in the degree-d frame.

    Writing p = sum (-1)^i a_i x^(d-i) and likewise q with b_i, the result is
    sum (-1)^i a_i b_i / binom(d, i) x^(d-i).
    """
    a = p.padded(d)[::-1]
    b = q.padded(d)[::-1]
    out = np.empty(d + 1)
    for i in range(d + 1):
        # (-1)^i a_i = a[i] in descending storage, so the sign appears once
        out[i] = (-1) ** i * a[i] * b[i] / math.comb(d, i)
    return Poly(out[::-1], trim_tol=0.0)


# ---------------------------------------------------------------------------
# Sturm chains


def _divmod(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    nb = b.size - 1
    r = a.astype(float).copy()
    q = np.zeros(max(a.size - nb, 1))
    lead = b[-1]
    for i in range(a.size - 1 - nb, -1, -1):
        coef = r[i + nb] / lead
        q[i] = coef
        r[i : i + nb + 1] -= coef * b
        r[i + nb] = 0.0
    return q, r[:nb]


def _unit(c: np.ndarray) -> np.ndarray:
    return c / np.max(np.abs(c))


@dataclass(frozen=True)
class SturmChain:
    """p, p', then negated remainders, each rescaled to unit max-norm."""

    polys: tuple[Poly, ...]
    _fwd: np.ndarray = field(init=False, repr=False, compare=False)
    _rev: np.ndarray = field(init=False, repr=False, compare=False)
    _deg: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        degs = np.array([p.degree for p in self.polys])
        width = int(degs.max()) + 1
        fwd = np.zeros((len(self.polys), width))
        rev = np.zeros((len(self.polys), width))
        for r, p in enumerate(self.polys):
            fwd[r, : p.coeffs.size] = p.coeffs
            rev[r, : p.coeffs.size] = p.coeffs[::-1]
        object.__setattr__(self, "_fwd", fwd)
        object.__setattr__(self, "_rev", rev)
        object.__setattr__(self, "_deg", degs)

    @property
    def gcd_degree(self) -> int:
        return self.polys[-1].degree

    def signs(self, x: float) -> np.ndarray:
        # |x| > 1 is evaluated as x^n * sum c_i (1/x)^(n-i) so nothing overflows
        width = self._fwd.shape[1]
        if abs(x) <= 1.0:
            vals = self._fwd @ (x ** np.arange(width))
            return np.sign(vals)
        y = 1.0 / x
        vals = self._rev @ (y ** np.arange(width))
        s = np.sign(vals)
        if x < 0:
            s = s * np.where(self._deg % 2, -1.0, 1.0)
        return s

    def variations(self, x: float) -> int:
        s = self.signs(x)
        if not np.all(np.isfinite(s)):
            raise DegenerateChain(f"non-finite chain value at x={x!r}")
        s = s[s != 0]
        return int(np.count_nonzero(s[1:] != s[:-1]))


def sturm_chain(p: Poly, trunc: float = CHAIN_TRUNC_TOL) -> SturmChain:
    if p.degree < 1:
        raise PreconditionError("Sturm chain needs a nonconstant polynomial")
    a = _unit(p.coeffs)
    b = _unit(derivative(Poly(a, trim_tol=0.0)).coeffs)
    polys = [Poly(a, trim_tol=0.0), Poly(b, trim_tol=0.0)]
    while b.size > 1:
        q, r = _divmod(a, b)
        # drop cancellation noise at the top of the remainder
        scale = max(np.max(np.abs(a)), np.max(np.abs(q)) * np.max(np.abs(b)))
        cut = trunc * scale
        n = r.size
        while n and abs(r[n - 1]) <= cut:
            n -= 1
        if n == 0:
            break
        r = -_unit(r[:n])
        if not np.all(np.isfinite(r)):
            raise DegenerateChain("non-finite remainder in Sturm chain")
        polys.append(Poly(r, trim_tol=0.0))
        a, b = b, r
    return SturmChain(tuple(polys))


def _squarefree_chain(p: Poly, trunc: float) -> SturmChain:
    """Chain of p with repeated factors divided out when that is clean.

    Sign evaluation near a multiple root is swamped by rounding, so bisection
    works much better on the squarefree part.
    """
    chain = sturm_chain(p, trunc)
    if chain.gcd_degree < 1:
        return chain
    q, r = _divmod(_unit(p.coeffs), chain.polys[-1].coeffs)
    if r.size and np.max(np.abs(r)) > max(1e-8, trunc) * np.max(np.abs(q)):
        return chain
    reduced = sturm_chain(Poly(q, trim_tol=0.0), trunc)
    return reduced if reduced.gcd_degree == 0 else chain


def sturm_count(chain: SturmChain, a: float, b: float) -> int:
    """Number of distinct real roots of the chain head in (a, b]."""
    if not a < b:
        raise PreconditionError("need a < b")
    n = chain.variations(a) - chain.variations(b)
    head = chain.polys[0].degree
    if n < 0 or n > head:
        raise DegenerateChain(f"inconsistent Sturm count {n} for degree {head}")
    return n


def cauchy_bound(p: Poly) -> float:
    c = p.coeffs
    return 1.0 + float(np.max(np.abs(c[:-1])) / abs(c[-1])) if c.size > 1 else 1.0


# ---------------------------------------------------------------------------
# roots


def real_roots(p: Poly, imag_tol: float = IMAG_TOL) -> np.ndarray:
    """All roots via the (balanced) companion matrix, descending.

    Raises NotRealRooted if any root has an imaginary part above
    ``imag_tol * spectral radius``.
    """
    if p.is_zero:
        raise ZeroPolynomialRoot("roots of the zero polynomial")
    if p.degree == 0:
        return np.empty(0)
    z = np.polynomial.polynomial.polyroots(p.coeffs)
    radius = max(float(np.max(np.abs(z))), np.finfo(float).tiny)
    if np.any(np.abs(z.imag) > imag_tol * radius):
        raise NotRealRooted(f"complex roots found: {z[np.abs(z.imag) > imag_tol * radius]}")
    return np.sort(z.real)[::-1]


def _split_zero_roots(p: Poly) -> tuple[int, Poly]:
    nz = np.flatnonzero(p.coeffs)
    m = int(nz[0]) if nz.size else 0
    return m, Poly(p.coeffs[m:], trim_tol=0.0)


def _check_nonconstant(p: Poly) -> None:
    if p.is_zero:
        raise ZeroPolynomialRoot("root query on the zero polynomial")
    if p.degree == 0:
        raise PreconditionError("root query on a nonzero constant")


def maxroot(p: Poly, eps: float = DEFAULT_EPS) -> float:
    """Largest root of a real-rooted polynomial to within ``eps``.

    Bisection on Sturm counts inside the Cauchy interval. Exact zero roots are
    factored out first.
    """
    _check_nonconstant(p)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    m, q = _split_zero_roots(p)
    if q.degree == 0:
        return 0.0
    root = None
    for trunc in CHAIN_TRUNC_LADDER:
        try:
            root = _bisect_maxroot(_squarefree_chain(q, trunc), cauchy_bound(q), eps)
            break
        except DegenerateChain:
            continue
    if root is None:
        # companion fallback; a clustered root may split into a slightly
        # complex pair, hence the looser tolerance
        root = float(real_roots(q, FALLBACK_IMAG_TOL)[0])
    return max(root, 0.0) if m else root


def _bisect_maxroot(chain: SturmChain, bound: float, eps: float) -> float:
    hi, lo = bound, -bound
    v_hi = chain.variations(hi)
    total = chain.variations(lo) - v_hi
    expected = chain.polys[0].degree - chain.gcd_degree
    if total != expected:
        raise DegenerateChain(f"Sturm count {total} over the Cauchy interval, expected {expected}")
    while hi - lo > eps:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if chain.variations(mid) - v_hi > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def minroot(p: Poly, eps: float = DEFAULT_EPS) -> float:
    return -maxroot(p.reflect(), eps)


def is_real_rooted(p: Poly) -> bool:
    if p.is_zero:
        raise ZeroPolynomialRoot("real-rootedness of the zero polynomial")
    _, q = _split_zero_roots(p)
    if q.degree <= 0:
        return True
    bound = cauchy_bound(q)
    for trunc in CHAIN_TRUNC_LADDER:
        try:
            chain = _squarefree_chain(q, trunc)
            if sturm_count(chain, -bound, bound) == chain.polys[0].degree - chain.gcd_degree:
                return True
        except DegenerateChain:
            pass
    try:
        real_roots(q)
    except NotRealRooted:
        return False
    return True


@dataclass(frozen=True)
class RootOrderFacts:
    is_real_rooted: bool
    maxroot: float
    minroot: float
    eps: float


def root_order_facts(p: Poly, eps: float = DEFAULT_EPS) -> RootOrderFacts:
    if not is_real_rooted(p):
        return RootOrderFacts(False, math.nan, math.nan, eps)
    return RootOrderFacts(True, maxroot(p, eps), minroot(p, eps), eps)


def interlaces(f: Poly, g: Poly, slack: float = 1e-9) -> bool:
    """Whether f interlaces g (f has degree d, g degree d or d-1)."""
    d = f.degree
    if g.degree not in (d, d - 1):
        raise DegreeMismatch(f"deg g = {g.degree} not in {{{d}, {d - 1}}}")
    try:
        rf = real_roots(f)
        rg = real_roots(g)
    except NotRealRooted:
        return False
    merged = np.empty(rf.size + rg.size)
    merged[0::2] = rf
    merged[1::2] = rg
    tol = slack * (1.0 + np.abs(merged[1:]))
    return bool(np.all(merged[:-1] >= merged[1:] - tol))


def barrier_minroot_bound(roots: Sequence[float], k: int) -> float:
    """Lower bound on minroot of the k-th derivative of prod (x - beta_i).

    Returns (1 - c) beta_1 + c beta_{k+1}, where
    alpha = (beta_{k+1} - mean(beta_1..beta_k)) / (beta_{k+1} - beta_1) and
    c = (k/t) (sqrt(1 - (k/t) alpha) - sqrt(alpha - (k/t) alpha))^2.
    """
    beta = np.sort(np.asarray(roots, dtype=float))
    t = beta.size
    if not 2 <= k <= t - 1:
        raise PrecondViolated(f"need 2 <= k <= t-1, got k={k}, t={t}")
    if not beta[k - 1] > beta[0]:
        raise PrecondViolated("beta_k must exceed beta_1")
    b1, bk1 = beta[0], beta[k]
    alpha = (bk1 - beta[:k].mean()) / (bk1 - b1)
    rho = k / t
    c = rho * (math.sqrt(1.0 - rho * alpha) - math.sqrt(max(alpha - rho * alpha, 0.0))) ** 2
    return float((1.0 - c) * b1 + c * bk1)
