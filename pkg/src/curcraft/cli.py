"""Command-line front end: ``curcraft --mode classical --a A.csv --k 2``."""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import __version__
from . import densela as la
from .cur_polynomials import GcurInstance
from .errors import ConfigError, CurcraftError, NumericFailure, ParseError, ResidualMismatch
from .matrixio import dumps, gen_matrix, load_matrix, parse_params, perturb, write_matrix
from .selection import (
    BoundValue,
    SelectionReport,
    bound_baseline,
    bound_th14,
    bound_th17,
    greedy_classical_cur,
    oracle_exhaustive,
    row_subset_select,
    tree_greedy_gcur,
)

MODES = ("classical", "generalized", "rows", "oracle", "bound", "gen")
THREADS_ENV = "CURCRAFT_THREADS"
RECHECK_RTOL = 1e-10


@dataclass
class RunConfig:
    mode: str
    a: Optional[str] = None
    c: Optional[str] = None
    u: Optional[str] = None
    r: Optional[str] = None
    k: Optional[int] = None
    eps: float = 1e-9
    seed: int = 0
    out: Optional[str] = None
    gen_kind: Optional[str] = None
    gen_params: Optional[str] = None
    perturb_t: Optional[float] = None
    timing: bool = False

    def validate(self) -> None:
        need = {
            "classical": ("a", "k"),
            "generalized": ("a", "c", "u", "r", "k"),
            "rows": ("a", "c"),
            "oracle": ("a",),
            "bound": ("a", "k"),
            "gen": ("gen_kind",),
        }[self.mode]
        missing = [f"--{name.replace('_', '-')}" for name in need if getattr(self, name) is None]
        if missing:
            raise ConfigError(f"mode {self.mode} requires {', '.join(missing)}")
        if self.mode == "oracle" and self.k is None and self.c is None:
            raise ConfigError("mode oracle requires --k (or --c for a row-subset instance)")
        if self.k is not None and self.k < 1:
            raise ConfigError("--k must be at least 1")
        if not self.eps > 0:
            raise ConfigError("--eps must be positive")
        if self.seed < 0 or self.seed >= 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")

    def echo(self) -> dict:
        out = asdict(self)
        out.pop("timing")
        return out


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="curcraft", description="Deterministic CUR and subset selection.")
    p.add_argument("--mode", required=True, choices=MODES)
    p.add_argument("--a", help="CSV file with the matrix A")
    p.add_argument("--c", help="CSV file with C (generalized/rows modes)")
    p.add_argument("--u", help="CSV file with U (generalized mode)")
    p.add_argument("--r", help="CSV file with R (generalized mode)")
    p.add_argument("--k", type=int, help="number of rows/columns to select")
    p.add_argument("--eps", type=float, default=1e-9, help="root bisection tolerance")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--gen-kind", help="gaussian | lowrank-noise | perturbed")
    p.add_argument("--gen-params", help="comma separated key=value pairs, e.g. n=5,d=4")
    p.add_argument("--perturb-t", type=float, help="add t times a totally positive kernel to A")
    p.add_argument("--timing", action="store_true", help="record wall-clock time in the report")
    return p


def _bound_dict(b: Optional[BoundValue], reason: str) -> dict:
    return (b or BoundValue(reason=reason)).as_dict()


def _recheck(report: SelectionReport, inst: GcurInstance) -> None:
    B = la.residual(inst.A, inst.C, inst.U, inst.R, report.s_hat, report.w_hat)
    direct = float(np.linalg.norm(B, 2) ** 2) if B.size else 0.0
    floor = 1e-14 * max(la.spectral_norm_sq(inst.A), 1.0)
    if abs(direct - report.residual_norm_sq) > RECHECK_RTOL * abs(direct) + floor:
        raise ResidualMismatch(
            f"reported residual {report.residual_norm_sq!r} disagrees with recomputed {direct!r}"
        )


def _instance(cfg: RunConfig, A, mats) -> GcurInstance:
    if cfg.mode == "classical":
        return GcurInstance.classical(A, cfg.k)
    if cfg.mode == "rows" or (cfg.mode == "oracle" and "c" in mats and "u" not in mats):
        return GcurInstance.row_subset(A, mats["c"])
    if cfg.mode == "generalized" or (cfg.mode == "oracle" and "u" in mats):
        return GcurInstance.general(A, mats["c"], mats["u"], mats["r"], cfg.k)
    return GcurInstance.classical(A, cfg.k)


def run(cfg: RunConfig) -> Optional[dict]:
    """Execute one configuration; returns the JSON report (None for gen)."""
    cfg.validate()
    start = time.perf_counter()
    if cfg.mode == "gen":
        params = parse_params(cfg.gen_params)
        if cfg.gen_kind == "perturbed":
            params.setdefault("base", cfg.a)
            if cfg.perturb_t is not None:
                params.setdefault("t", str(cfg.perturb_t))
        M = gen_matrix(cfg.gen_kind, params, cfg.seed)
        text = write_matrix(M, cfg.out)
        if cfg.out is None:
            sys.stdout.write(text)
        return None

    A = load_matrix(cfg.a)
    if cfg.perturb_t is not None:
        A = perturb(A, cfg.perturb_t)
    mats = {name: load_matrix(getattr(cfg, name)) for name in ("c", "u", "r") if getattr(cfg, name)}
    if cfg.mode == "generalized" and len(mats) != 3:
        raise ConfigError("mode generalized requires --c, --u and --r")
    k = cfg.k if cfg.k is not None else mats["c"].shape[1]

    shapes = {"A": list(A.shape), "rank_A": la.numerical_rank(A)}
    shapes.update({name.upper(): list(M.shape) for name, M in mats.items()})

    selection = None
    report = None
    if cfg.mode != "bound":
        inst = _instance(cfg, A, mats)
        if cfg.mode == "classical":
            report = greedy_classical_cur(A, cfg.k, cfg.eps, thread_count())
        elif cfg.mode == "generalized":
            report = tree_greedy_gcur(inst, cfg.eps)
        elif cfg.mode == "rows":
            report = row_subset_select(A, mats["c"], cfg.eps)
        else:
            report = oracle_exhaustive(inst, cfg.eps)
        _recheck(report, inst)
        selection = {
            "algorithm": report.algorithm,
            "s_hat": report.s_hat,
            "w_hat": report.w_hat,
            "residual_norm_sq": report.residual_norm_sq,
            "pk_maxroot": report.pk_maxroot,
            "eps": report.eps,
            "trace": [asdict(step) for step in report.trace],
        }

    th14 = report.bound_th14 if report and report.bound_th14 else bound_th14(A, k)
    baseline = report.bound_baseline if report and report.bound_baseline else bound_baseline(A, k)
    th17 = report.bound_th17 if report else None
    if th17 is None and "c" in mats and mats["c"].shape[1] == k and "u" not in mats:
        th17 = BoundValue(bound_th17(A, mats["c"]))

    out = {
        "config": cfg.echo(),
        "shapes": shapes,
        "selection": selection,
        "bounds": {
            "th14": _bound_dict(th14, ""),
            "th17": _bound_dict(th17, "needs a row-subset instance (C with k columns)"),
            "baseline": _bound_dict(baseline, ""),
        },
        "timing_ms": (time.perf_counter() - start) * 1e3 if cfg.timing else None,
        "version": __version__,
    }
    return out


def _error_json(exc: BaseException) -> str:
    body = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ParseError):
        body["line"] = exc.line
        body["column"] = exc.column
    return dumps(body)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**{k: v for k, v in vars(args).items()})
    try:
        report = run(cfg)
    except NumericFailure as exc:
        sys.stderr.write(_error_json(exc) + "\n")
        return 3
    except CurcraftError as exc:
        sys.stderr.write(_error_json(exc) + "\n")
        return 2
    if report is not None:
        text = dumps(report) + "\n"
        if cfg.out:
            with open(cfg.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
