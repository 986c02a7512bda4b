import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from curcraft.errors import (
    DegreeExceedsFlipOrder,
    DegreeMismatch,
    NotRealRooted,
    PrecondViolated,
    ZeroPolynomialRoot,
)
from curcraft.polynomials import (
    Poly,
    barrier_minroot_bound,
    derivative,
    dk_xk_apply,
    flip,
    interlaces,
    is_real_rooted,
    laguerre_flip_apply,
    maxroot,
    minroot,
    mult_convolution,
    real_roots,
    root_order_facts,
    sturm_chain,
    sturm_count,
)

roots_strategy = st.lists(
    st.floats(min_value=-10, max_value=10, allow_nan=False), min_size=1, max_size=9
)


def test_trim_and_degree():
    assert Poly([1, 2, 0, 1e-20]).degree == 1
    assert Poly([]).is_zero and Poly([]).degree == -1
    assert Poly([0.0, 0.0]).is_zero
    assert Poly([1e-20, 1e-21], trim_tol=0.0).degree == 1


def test_arithmetic():
    p = Poly([1, 1])
    q = Poly([-1, 1])
    assert (p * q).allclose(Poly([-1, 0, 1]))
    assert (p + q).allclose(Poly([0, 2]))
    assert (p - p).is_zero
    assert p(2.0) == 3.0
    assert Poly([1, 2, 3]).reflect().allclose(Poly([1, -2, 3]))


def test_derivative_examples():
    assert derivative(Poly([0, 0, 0, 1])).allclose(Poly([0, 0, 3]))
    assert derivative(Poly([5])).is_zero
    assert derivative(Poly([1, 1, 1, 1]), 2).allclose(Poly([2, 6]))


def test_flip_examples():
    assert flip(Poly([1, 2, 3]), 2).allclose(Poly([3, 2, 1]))
    assert flip(Poly([0, 1]), 3).allclose(Poly([0, 0, 1]))
    with pytest.raises(DegreeExceedsFlipOrder):
        flip(Poly([1, 1, 1]), 1)


def test_laguerre_flip_examples():
    assert laguerre_flip_apply(Poly([1, -2, 1]), 2, 1).allclose(Poly([0, 4, -2]))
    assert laguerre_flip_apply(Poly.monomial(4), 4, 2).is_zero
    p = Poly([3, 1, 4, 1, 5])
    assert laguerre_flip_apply(p, 4, 0).allclose(p)


@settings(max_examples=40, deadline=None)
@given(
    coeffs=st.lists(st.floats(min_value=-5, max_value=5, allow_nan=False), min_size=1, max_size=13),
    k=st.integers(min_value=1, max_value=4),
)
def test_laguerre_flip_matches_literal(coeffs, k):
    d = len(coeffs) - 1
    if k > d:
        return
    fast = laguerre_flip_apply(Poly(coeffs, trim_tol=0.0), d, k)
    slow = oracles.literal_laguerre_flip(coeffs, d, k)
    assert oracles.rel_close(fast.coeffs, slow, 1e-10)


@settings(max_examples=40, deadline=None)
@given(
    coeffs=st.lists(st.floats(min_value=-5, max_value=5, allow_nan=False), min_size=1, max_size=10),
    k=st.integers(min_value=0, max_value=5),
)
def test_dk_xk_matches_literal(coeffs, k):
    fast = dk_xk_apply(Poly(coeffs, trim_tol=0.0), k)
    assert oracles.rel_close(fast.coeffs, oracles.literal_dk_xk(coeffs, k), 1e-12)


def test_mult_convolution_identity_element_and_symmetry():
    # (x - 1)^d is the identity for the degree-d convolution
    d = 4
    p = Poly.from_roots([0.5, 1.5, 2.0, 3.0])
    unit = Poly.from_roots([1.0] * d)
    assert mult_convolution(p, unit, d).allclose(p)
    q = Poly.from_roots([0.2, 0.7, 1.1, 4.0])
    assert mult_convolution(p, q, d).allclose(mult_convolution(q, p, d))


def test_mult_convolution_maxroot_product():
    rng = np.random.default_rng(4)
    for _ in range(20):
        d = int(rng.integers(2, 7))
        p = Poly.from_roots(rng.uniform(0, 3, d))
        q = Poly.from_roots(rng.uniform(0, 3, d))
        conv = mult_convolution(p, q, d)
        assert is_real_rooted(conv)
        assert maxroot(conv) <= maxroot(p) * maxroot(q) + 1e-7


def test_maxroot_examples():
    assert abs(maxroot(Poly.from_roots([1, 2, 3, 4])) - 4) <= 1e-9
    assert abs(minroot(Poly.from_roots([1, 2, 3, 4])) - 1) <= 1e-9
    assert abs(maxroot(Poly([-2, 0, 1])) - math.sqrt(2)) <= 1e-9
    assert maxroot(Poly([0, 0, 1])) == 0.0
    with pytest.raises(ZeroPolynomialRoot):
        maxroot(Poly())
    with pytest.raises(NotRealRooted):
        maxroot(Poly([1, 0, 1]))


def test_maxroot_multiple_roots():
    assert abs(maxroot(Poly.from_roots([2, 2, 1])) - 2) <= 1e-9
    assert abs(maxroot(Poly.from_roots([3, 3, 3, 1, -1])) - 3) <= 1e-8
    assert abs(minroot(Poly.from_roots([1, 1, 5])) - 1) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(roots=roots_strategy)
def test_maxroot_against_companion(roots):
    roots = np.array(roots)
    # keep clusters separated so the reference itself is well conditioned
    if roots.size > 1 and np.min(np.diff(np.sort(roots))) < 1e-3:
        return
    p = Poly.from_roots(roots)
    ref = oracles.real_roots_desc(p.coeffs)
    tol = 1e-9 * max(1.0, abs(ref[0])) + 1e-9
    assert abs(maxroot(p) - ref[0]) <= 10 * tol
    assert abs(minroot(p) - ref[-1]) <= 10 * tol


def test_sturm_count_intervals():
    chain = sturm_chain(Poly.from_roots([1, 2, 3]))
    assert sturm_count(chain, 0, 4) == 3
    assert sturm_count(chain, 1.5, 2.5) == 1
    assert sturm_count(chain, 3.5, 10) == 0
    assert sturm_count(chain, 1.5, 2.0 + 1e-9) == 1
    assert sturm_count(chain, -5.0, 1.0 - 1e-9) == 0


def test_sturm_count_square_free():
    chain = sturm_chain(Poly.from_roots([1, 1, 2]))
    assert chain.gcd_degree == 1
    assert sturm_count(chain, 0, 3) == 2


def test_real_rootedness():
    assert is_real_rooted(Poly.from_roots([1, 2, 3]))
    assert not is_real_rooted(Poly([1, 0, 1]))
    assert is_real_rooted(Poly([0, 0, 1]))
    facts = root_order_facts(Poly.from_roots([-1, 5]))
    assert facts.is_real_rooted and abs(facts.maxroot - 5) < 1e-8 and abs(facts.minroot + 1) < 1e-8


def test_real_roots_companion():
    r = real_roots(Poly.from_roots([3, -1, 2]))
    assert np.allclose(r, [3, 2, -1])


def test_interlacing_examples():
    f = Poly.from_roots([0, 2, 4])
    assert interlaces(f, Poly.from_roots([1, 3]))
    assert not interlaces(f, Poly.from_roots([1, 5]))
    assert interlaces(Poly.from_roots([1, 3]), Poly.from_roots([0, 2]))
    with pytest.raises(DegreeMismatch):
        interlaces(f, Poly([1]))


def test_derivative_interlaces():
    rng = np.random.default_rng(7)
    for _ in range(20):
        p = Poly.from_roots(rng.normal(size=int(rng.integers(2, 8))))
        assert interlaces(p, derivative(p))


def test_barrier_bound_example():
    assert abs(barrier_minroot_bound([1, 2, 3, 4], 2) - 1.0317541634481457) < 1e-12
    true_min = min(oracles.real_roots_desc([70, -60, 12]))
    assert barrier_minroot_bound([1, 2, 3, 4], 2) <= true_min


def test_barrier_bound_preconditions():
    with pytest.raises(PrecondViolated):
        barrier_minroot_bound([1, 2, 3], 1)
    with pytest.raises(PrecondViolated):
        barrier_minroot_bound([1, 1, 1, 2], 3)
