"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import json
import os
import subprocess
import sys
import time

import numpy as np

import oracles
from curcraft import densela as la
from curcraft.cur_polynomials import (
    GcurInstance,
    SelectionTable,
    expected_poly_bruteforce,
    expected_poly_classical,
    f_poly_classical_closed,
)
from curcraft.matrixio import format_matrix
from curcraft.polynomials import (
    Poly,
    barrier_minroot_bound,
    dk_xk_apply,
    laguerre_flip_apply,
    maxroot,
    minroot,
    mult_convolution,
)
from curcraft.selection import (
    bound_th14,
    bound_th17,
    greedy_classical_cur,
    oracle_exhaustive,
    row_subset_select,
    tree_greedy_gcur,
)


def verdict(capsys, number, failures, detail=""):
    ok = not failures
    with capsys.disabled():
        print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    assert ok, failures[:5]


def test_criterion_01_closed_form_vs_bruteforce(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(101)
    failures = []
    closed = expected_poly_classical(np.eye(2), 1)
    if not closed.allclose(Poly([0, -4, 2]), rtol=1e-12):
        failures.append(("identity example", closed))
    done = 0
    while done < 50:
        n, d = int(rng.integers(2, 9)), int(rng.integers(2, 9))
        k = int(rng.integers(1, 4))
        if k > min(n, d):
            continue
        A = rng.normal(size=(n, d))
        ours = expected_poly_classical(A, k)
        brute = expected_poly_bruteforce(GcurInstance.classical(A, k)).reflect()
        if not oracles.rel_close(ours.coeffs, brute.coeffs, 1e-6):
            failures.append((n, d, k))
        done += 1
    elapsed = time.perf_counter() - start
    if elapsed >= 60:
        failures.append(f"runtime {elapsed:.1f}s")
    verdict(capsys, 1, failures, f"(50 instances, {elapsed:.1f}s)")


def test_criterion_02_greedy_guarantee(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(202)
    eps = 1e-6
    failures = []
    for _ in range(30):
        n, d = int(rng.integers(5, 21)), int(rng.integers(5, 21))
        k = int(rng.integers(1, 6))
        A = rng.normal(size=(n, d))
        rep = greedy_classical_cur(A, k, eps)
        # closed form computed here on the unnormalized matrix, independently of the report
        pk = maxroot(expected_poly_classical(A, k), 1e-9)
        direct = oracles.spectral_sq(oracles.residual_by_inverse(A, A, A, A, rep.s_hat, rep.w_hat))
        if not direct <= 2 * k * eps + pk:
            failures.append((n, d, k, direct, pk))
    elapsed = time.perf_counter() - start
    if elapsed >= 300:
        failures.append(f"runtime {elapsed:.1f}s")
    verdict(capsys, 2, failures, f"(30 instances, {elapsed:.1f}s)")


def test_criterion_03_existence_general(capsys):
    rng = np.random.default_rng(303)
    failures = []
    for _ in range(30):
        n, d = int(rng.integers(2, 7)), int(rng.integers(2, 7))
        nr, dc = int(rng.integers(2, 9)), int(rng.integers(2, 9))
        k = int(rng.integers(1, 3))
        inst = GcurInstance.general(
            rng.normal(size=(n, d)), rng.normal(size=(n, dc)),
            rng.normal(size=(nr, dc)), rng.normal(size=(nr, d)), k,
        )
        best = oracle_exhaustive(inst).residual_norm_sq
        pk = -minroot(expected_poly_bruteforce(inst), 1e-10)
        if not best <= pk + 1e-6:
            failures.append((n, d, nr, dc, k, best, pk))
    verdict(capsys, 3, failures, "(30 instances)")


def test_criterion_04_spectral_bound(capsys):
    rng = np.random.default_rng(404)
    failures = []
    done = 0
    while done < 20:
        n, d = int(rng.integers(4, 11)), int(rng.integers(4, 11))
        A = rng.normal(size=(n, d))
        A /= np.linalg.norm(A, 2)
        t = la.numerical_rank(A)
        k = int(rng.integers(2, t))
        bound = bound_th14(A, k)
        if not bound.present:
            continue
        done += 1
        rep = greedy_classical_cur(A, k, 1e-9)
        pk = maxroot(expected_poly_classical(A, k), 1e-10)
        if not (rep.residual_norm_sq <= bound.value and pk <= bound.value):
            failures.append((n, d, k, rep.residual_norm_sq, pk, bound.value))
    verdict(capsys, 4, failures, "(20 instances)")


def test_criterion_05_row_subset(capsys):
    rng = np.random.default_rng(505)
    failures = []
    for _ in range(20):
        n, d = int(rng.integers(3, 10)), int(rng.integers(1, 6))
        k = int(rng.integers(1, min(n, 4)))
        A = rng.normal(size=(n, d))
        C = rng.normal(size=(n, k))
        rep = row_subset_select(A, C)
        bound = bound_th17(A, C)
        if not rep.residual_norm_sq <= bound * (1 + 1e-12):
            failures.append((n, d, k, rep.residual_norm_sq, bound))
    rep = row_subset_select(np.array([[1.0], [0.0]]), np.array([[1.0], [1.0]]))
    bound = bound_th17(np.array([[1.0], [0.0]]), np.array([[1.0], [1.0]]))
    if not (abs(rep.residual_norm_sq - 1) <= 1e-12 and abs(bound - 1) <= 1e-12):
        failures.append(("d=1 example", rep.residual_norm_sq, bound))
    verdict(capsys, 5, failures, "(20 instances + d=1 example)")


def test_criterion_06_operator_identities(capsys):
    rng = np.random.default_rng(606)
    failures = []
    for _ in range(50):
        d = int(rng.integers(1, 13))
        k = int(rng.integers(1, min(4, d) + 1))
        c = rng.normal(size=d + 1)
        fast = laguerre_flip_apply(Poly(c, trim_tol=0.0), d, k)
        if not oracles.rel_close(fast.coeffs, oracles.literal_laguerre_flip(c, d, k), 1e-10):
            failures.append(("laguerre", d, k))
    for r in range(1, 9):
        for k in range(1, 6):
            q = Poly(rng.normal(size=r + 1), trim_tol=0.0)
            lhs = oracles.literal_dk_xk(q.coeffs, k)
            kernel = dk_xk_apply(Poly.from_roots([1.0] * r), k)
            rhs = mult_convolution(q, kernel, r)
            if not oracles.rel_close(lhs, rhs.coeffs, 1e-10):
                failures.append(("convolution", r, k))
    for d in range(1, 9):
        for k in range(1, d + 1):
            if not laguerre_flip_apply(Poly.monomial(d), d, k).is_zero:
                failures.append(("annihilation", d, k))
            if np.any(oracles.literal_laguerre_flip(Poly.monomial(d).coeffs, d, k) != 0):
                failures.append(("annihilation literal", d, k))
    verdict(capsys, 6, failures)


def test_criterion_07_minroot_bounds(capsys):
    failures = []
    for k in range(1, 11):
        for r in range(1, 11):
            poly = dk_xk_apply(Poly.from_roots([1.0] * r), k)
            floor = 1.0 / (1 + k * r)
            companion = min(oracles.companion_real_parts(poly.coeffs))
            sturm = minroot(poly, 1e-12)
            if not (companion >= floor - 1e-12 and sturm >= floor - 1e-12):
                failures.append(("dk_xk minroot floor", k, r, companion, sturm, floor))
    rng = np.random.default_rng(707)
    for _ in range(100):
        t = int(rng.integers(4, 9))
        k = int(rng.integers(2, t))
        beta = np.sort(rng.uniform(0.0, 5.0, t))
        f = oracles.poly_from_roots(beta)
        g = f
        for _ in range(k):
            g = oracles.literal_derivative(g)
        true_min = min(oracles.real_roots_desc(g))
        bound = barrier_minroot_bound(beta, k)
        if not bound <= true_min + 1e-9:
            failures.append(("barrier", t, k, bound, true_min))
    verdict(capsys, 7, failures, "(100 k,r pairs + 100 barrier cases)")


def test_criterion_08_rank_one_update(capsys):
    rng = np.random.default_rng(808)
    failures = []
    for _ in range(100):
        A = rng.normal(size=(8, 8))
        size = int(rng.integers(0, 4))
        S = tuple(sorted(int(v) for v in rng.choice(8, size, replace=False)))
        W = tuple(sorted(int(v) for v in rng.choice(8, size, replace=False)))
        i = int(rng.choice([r for r in range(8) if r not in S]))
        j = int(rng.choice([c for c in range(8) if c not in W]))
        B = oracles.residual_by_inverse(A, A, A, A, S, W) if S else A.copy()
        updated = la.rank_one_update(B, i, j)
        direct = oracles.residual_by_inverse(A, A, A, A, S + (i,), W + (j,))
        if np.max(np.abs(updated - direct)) > 1e-9 * max(1.0, np.max(np.abs(direct))):
            failures.append(("update", S, W, i, j))
        grown = np.linalg.det(A[np.ix_(S + (i,), W + (j,))])
        base = np.linalg.det(A[np.ix_(S, W)]) if S else 1.0
        if abs(grown - base * B[i, j]) > 1e-9 * max(1.0, abs(grown)):
            failures.append(("determinant", S, W, i, j))
    verdict(capsys, 8, failures, "(100 instances)")


def test_criterion_09_node_polynomials(capsys):
    rng = np.random.default_rng(909)
    failures = []
    for _ in range(4):
        A = rng.normal(size=(6, 5))
        k = 2
        inst = GcurInstance.classical(A, k)
        table = SelectionTable.build(inst)
        nodes = [((), ()), ((0,), ()), ((3,), (1,)), ((2,), ())]
        for s_tilde, w_tilde in nodes:
            parent = table.node(s_tilde, w_tilde).poly
            total = Poly()
            for i in range(6):
                if i not in s_tilde:
                    total = total + table.node(tuple(sorted(s_tilde + (i,))), w_tilde).poly
            if not oracles.rel_close(total.coeffs, (parent * (k - len(s_tilde))).coeffs, 1e-6):
                failures.append(("recurrence", s_tilde, w_tilde))
        for s_tilde, w_tilde in [((), ()), ((1,), (2,)), ((4,), (0,)), ((0, 5), (1, 3))]:
            closed = f_poly_classical_closed(A, k, s_tilde, w_tilde).poly
            brute = table.node(s_tilde, w_tilde).poly
            if not oracles.rel_close(closed.coeffs, brute.coeffs, 1e-6):
                failures.append(("closed form", s_tilde, w_tilde))
        rep = tree_greedy_gcur(inst)
        pk = maxroot(expected_poly_classical(A, k), 1e-10)
        if not rep.residual_norm_sq <= pk + 1e-6:
            failures.append(("tree greedy", rep.residual_norm_sq, pk))
    for _ in range(4):
        inst = GcurInstance.general(
            rng.normal(size=(5, 4)), rng.normal(size=(5, 4)), rng.normal(size=(4, 4)),
            rng.normal(size=(4, 4)), 2,
        )
        rep = tree_greedy_gcur(inst)
        pk = -minroot(expected_poly_bruteforce(inst), 1e-10)
        direct = oracles.spectral_sq(oracles.residual_by_inverse(inst.A, inst.C, inst.U, inst.R, rep.s_hat, rep.w_hat))
        if not direct <= pk + 1e-6:
            failures.append(("tree greedy general", direct, pk))
    verdict(capsys, 9, failures, "(4 classical 6x5 + 4 general instances)")


def _run(args, threads):
    env = dict(os.environ)
    env["CURCRAFT_THREADS"] = str(threads)
    proc = subprocess.run([sys.executable, "-m", "curcraft", *args], capture_output=True, env=env)
    return proc


def test_criterion_10_cli_determinism(capsys, tmp_path):
    failures = []
    a_path = tmp_path / "a.csv"
    proc = _run(["--mode", "gen", "--gen-kind", "gaussian", "--gen-params", "n=12,d=10", "--seed", "42", "--out", str(a_path)], 1)
    if proc.returncode != 0:
        failures.append(("gen", proc.stderr))
    c_path = tmp_path / "c.csv"
    c_path.write_text(format_matrix(np.random.default_rng(1).normal(size=(12, 2))))
    runs = {
        "classical": ["--mode", "classical", "--a", str(a_path), "--k", "3", "--eps", "1e-9"],
        "rows": ["--mode", "rows", "--a", str(a_path), "--c", str(c_path)],
    }
    A = np.loadtxt(a_path, delimiter=",")
    C = np.loadtxt(c_path, delimiter=",")
    for name, args in runs.items():
        outputs = [_run(args, 1), _run(args, 1), _run(args, 4), _run(args, 4)]
        if any(p.returncode != 0 for p in outputs):
            failures.append((name, [p.stderr for p in outputs]))
            continue
        if len({p.stdout for p in outputs}) != 1:
            failures.append((name, "outputs differ"))
        report = json.loads(outputs[0].stdout)
        sel = report["selection"]
        if name == "classical":
            B = oracles.residual_by_inverse(A, A, A, A, sel["s_hat"], sel["w_hat"])
        else:
            B = oracles.residual_by_inverse(A, C, C, A, sel["s_hat"], sel["w_hat"])
        direct = oracles.spectral_sq(B)
        if abs(direct - sel["residual_norm_sq"]) > 1e-10 * abs(direct):
            failures.append((name, direct, sel["residual_norm_sq"]))
    verdict(capsys, 10, failures, "(2 modes x 2 runs x threads {1, 4})")
