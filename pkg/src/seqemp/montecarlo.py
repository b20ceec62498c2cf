"""Replication driver for size and power experiments.

Replication ``r`` of an experiment with master seed ``s`` receives the seed
path ``(s, r)``; results are collected in replication order, so they are
identical for any number of workers.
"""

from __future__ import annotations

from dataclasses import replace
from functools import partial
from typing import Callable, Optional

import numpy as np

from ._rng import Seed, child, seed_path
from .cpt_test import CptConfig, run_cpt_test
from .limits import QuantileTable, _map_chunks
from .seriesgen import CatalogFunction, Innovation, gen_regression, gen_setar
from .setar_test import SetarTestConfig, run_setar_test

__all__ = ["replicate", "setar_rejections", "cpt_rejections"]


def _run_block(fn, seed, start, stop):
    return [fn(child(seed, r)) for r in range(start, stop)]


def replicate(fn: Callable, reps: int, seed: Seed, *, workers: int = 1, start: int = 0, block: int = 50) -> list:
    """``[fn((seed..., r)) for r in range(start, start + reps)]``, optionally in parallel.

    ``fn`` must be picklable (a module-level function or a ``partial`` of one)
    when ``workers > 1``.
    """
    if reps < 1:
        raise ValueError("reps must be positive")
    seed_path(seed)
    stops = list(range(start, start + reps, block)) + [start + reps]
    args = [(fn, seed, a, b) for a, b in zip(stops[:-1], stops[1:])]
    out = []
    for part in _map_chunks(_run_block, args, workers):
        out.extend(part)
    return out


# ---------------------------------------------------------------------------
# SETAR threshold test
# ---------------------------------------------------------------------------


def _setar_one(n, mu1, mu2, threshold, innovation, config, seed):
    series = gen_setar(n, mu1, mu2, threshold, innovation, seed)
    rep = run_setar_test(series, replace(config, seed=list(seed)))
    return rep.statistics, rep.decisions


def setar_rejections(
    n: int,
    mu1: float = 0.0,
    mu2: float = 0.0,
    threshold: float = 0.0,
    innovation: Innovation = Innovation(),
    reps: int = 1000,
    seed: Seed = 0,
    *,
    level: float = 0.05,
    cvm_table: Optional[QuantileTable] = None,
    workers: int = 1,
) -> dict:
    """Rejection frequencies of ``T_n1`` (and ``T_n2`` if ``cvm_table`` is given)."""
    statistic = "both" if cvm_table is not None else "KS"
    config = SetarTestConfig(statistic=statistic, level=level, cvm_table=cvm_table)
    fn = partial(_setar_one, n, mu1, mu2, threshold, innovation, config)
    results = replicate(fn, reps, seed, workers=workers)
    names = list(results[0][0])
    stats = {k: np.array([r[0][k] for r in results]) for k in names}
    rejects = {k: np.array([r[1][k] for r in results]) for k in names}
    return {
        "n": n,
        "reps": reps,
        "seed": list(seed_path(seed)),
        "frequency": {k: float(v.mean()) for k, v in rejects.items()},
        "statistics": stats,
        "rejections": rejects,
    }


# ---------------------------------------------------------------------------
# changepoint test
# ---------------------------------------------------------------------------


def _cpt_one(n, d, shift, change_fraction, innovation, config, seed):
    after = CatalogFunction("constant", shift) if shift else None
    sample = gen_regression(
        n,
        d,
        innovation=innovation,
        seed=seed,
        change_fraction=change_fraction if shift else None,
        mean_fn_after=after,
    )
    rep = run_cpt_test(sample, replace(config, seed=seed, workers=1))
    return rep.statistics["S_n"], rep.critical_values["S_n"], rep.rejected, rep.locator["argmax_s"]


def cpt_rejections(
    n: int,
    d: int = 1,
    shift: float = 0.0,
    change_fraction: float = 0.5,
    innovation: Innovation = Innovation("mds"),
    reps: int = 1000,
    seed: Seed = 0,
    *,
    config: Optional[CptConfig] = None,
    workers: int = 1,
    start: int = 0,
) -> dict:
    """Rejection frequency and changepoint locations of the sup-type test.

    Under the null ``m = 0``, ``s = 1``; with ``shift != 0`` the mean jumps
    from 0 to ``shift`` after ``floor(change_fraction * n)`` observations.
    """
    config = config or CptConfig()
    fn = partial(_cpt_one, n, d, shift, change_fraction, innovation, config)
    res = replicate(fn, reps, seed, workers=workers, start=start, block=10)
    stat = np.array([r[0] for r in res])
    crit = np.array([r[1] for r in res])
    rej = np.array([r[2] for r in res])
    loc = np.array([r[3] for r in res])
    return {
        "n": n,
        "reps": reps,
        "seed": list(seed_path(seed)),
        "frequency": float(rej.mean()),
        "statistics": stat,
        "critical_values": crit,
        "rejections": rej,
        "argmax_s": loc,
        "median_argmax_s": float(np.median(loc[rej])) if rej.any() else float("nan"),
    }
