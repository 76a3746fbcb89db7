"""Noise-driven jumps between realisations and the resulting measured density.

The occupied realisation is redrawn from the full {alpha_i} distribution
whenever noise knocks the system out of it; the current realisation may be
drawn again.  Time-averaging the occupied density estimates the ensemble
density sum_i alpha_i rho_i(x).
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .realisations import RealisationDensity, RealisationSet


@dataclass(frozen=True)
class NoiseModel:
    sigma: float = 1.0
    rate0: float = 1.0
    mode: str = "activated"

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.rate0 < 0:
            raise ValueError(f"rate0 must be >= 0, got {self.rate0}")
        if self.mode not in ("threshold", "activated"):
            raise ValueError(f"unknown noise mode {self.mode!r}")


@dataclass(frozen=True, eq=False)
class EnsembleTrace:
    seed: int
    times: np.ndarray
    occupied: np.ndarray
    jump_count: int
    occupancy_freq: np.ndarray
    rho_ex_estimate: np.ndarray
    rho_ex_exact: np.ndarray
    x: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, EnsembleTrace):
            return NotImplemented
        return self.seed == other.seed and self.jump_count == other.jump_count and all(
            np.array_equal(getattr(self, k), getattr(other, k))
            for k in ("times", "occupied", "occupancy_freq", "rho_ex_estimate",
                      "rho_ex_exact", "x"))


def jump_probability(sep: float, noise: NoiseModel, dt: float) -> float:
    """Chance of leaving the occupied realisation during one step ``dt``.

    ``threshold``: rate0 applies only when sigma reaches the separation.
    ``activated``: rate0 * exp(-sep / sigma).
    """
    if sep < 0:
        raise ValueError(f"separation must be >= 0, got {sep}")
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if noise.sigma == 0 or noise.rate0 == 0 or math.isinf(sep):
        return 0.0
    if noise.mode == "threshold":
        rate = noise.rate0 if noise.sigma >= sep else 0.0
    else:
        rate = noise.rate0 * math.exp(-sep / noise.sigma)
    return -math.expm1(-rate * dt)


def separations(rs: RealisationSet) -> np.ndarray:
    """Per realisation: |shift difference| to the nearest other realisation."""
    s = rs.shifts()
    if s.size == 1:
        return np.array([math.inf])
    diff = np.abs(s[:, None] - s[None, :])
    np.fill_diagonal(diff, math.inf)
    return diff.min(axis=1)


def step(state: int, rs: RealisationSet, noise: NoiseModel, dt: float,
         rng: np.random.Generator) -> int:
    p = jump_probability(float(separations(rs)[state]), noise, dt)
    if p > 0 and rng.random() < p:
        return int(rng.choice(rs.n_r, p=rs.alphas))
    return state


def _density_matrix(rs: RealisationSet):
    """Stack realisation densities; unbound ones contribute zeros."""
    ref = next((r for r in rs.realisations if r.pdd is not None), None)
    if ref is None:
        return np.zeros(1), 1.0, np.zeros((rs.n_r, 1)), np.zeros(rs.n_r, bool)
    n = ref.pdd.size
    x = ref.x0 + ref.dx * np.arange(n)
    rho = np.zeros((rs.n_r, n))
    has = np.zeros(rs.n_r, bool)
    for i, r in enumerate(rs.realisations):
        if r.pdd is not None:
            if r.pdd.size != n:
                raise ValueError("realisation densities live on different grids")
            rho[i] = r.pdd
            has[i] = True
    return x, ref.dx, rho, has


def _mix(weights: np.ndarray, rho: np.ndarray, has: np.ndarray, dx: float) -> np.ndarray:
    w = np.where(has, weights, 0.0)
    if w.sum() == 0:
        return np.zeros(rho.shape[1])
    out = w @ rho
    return out / (out.sum() * dx)


def run(rs: RealisationSet, noise: NoiseModel, t_max: float, dt: float, seed: int,
        initial: int | None = None) -> EnsembleTrace:
    """Simulate one history of ``round(t_max / dt)`` steps.

    The initial realisation is drawn from {alpha_i} unless given.  Output is a
    pure function of the arguments.
    """
    n_steps = int(round(t_max / dt))
    if n_steps < 1:
        raise ValueError(f"t_max/dt must be >= 1, got {t_max}/{dt}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    alphas = np.asarray(rs.alphas)
    state = int(rng.choice(rs.n_r, p=alphas)) if initial is None else int(initial)
    if not 0 <= state < rs.n_r:
        raise ValueError(f"initial realisation {state} out of range")

    p_jump = np.array([jump_probability(s, noise, dt) for s in separations(rs)])
    occupied = np.empty(n_steps + 1, dtype=np.int64)
    occupied[0] = state
    jumps = 0
    if np.any(p_jump > 0):
        # draws are consumed in fixed blocks so the stream does not depend on state
        u = rng.random(n_steps)
        redraw = rng.choice(rs.n_r, size=n_steps, p=alphas)
        for t in range(n_steps):
            if u[t] < p_jump[state]:
                state = int(redraw[t])
                jumps += 1
            occupied[t + 1] = state
    else:
        occupied[1:] = state

    freq = np.bincount(occupied, minlength=rs.n_r) / occupied.size
    x, dx, rho, has = _density_matrix(rs)
    return EnsembleTrace(
        seed=seed,
        times=dt * np.arange(n_steps + 1),
        occupied=occupied,
        jump_count=jumps,
        occupancy_freq=freq,
        rho_ex_estimate=_mix(freq, rho, has, dx),
        rho_ex_exact=_mix(alphas, rho, has, dx),
        x=x,
    )


def run_repetitions(rs: RealisationSet, noise: NoiseModel, t_max: float, dt: float,
                    seed: int, n_reps: int, workers: int = 1) -> list:
    """Independent histories, one spawned seed stream each, in repetition order."""
    children = np.random.SeedSequence(seed).spawn(n_reps)
    seeds = [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]

    def one(s):
        return run(rs, noise, t_max, dt, s)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, seeds))
    return [one(s) for s in seeds]


def pooled_estimate(traces) -> np.ndarray:
    """Average of the per-history density estimates, in the given order."""
    acc = np.zeros_like(traces[0].rho_ex_estimate)
    for tr in traces:
        acc += tr.rho_ex_estimate
    return acc / len(traces)


def continuous_expectation(density: RealisationDensity,
                           rho_of_i: Callable[[float], np.ndarray] | np.ndarray,
                           dx: float) -> np.ndarray:
    """Integral of delta(i) rho_i(x) over the index domain.

    ``rho_of_i`` is either a callable returning rho_i on the x grid or an
    array of shape (len(i_grid), n_x).  ``dx`` is the x spacing used to
    normalise the result.
    """
    norm = density.integral()
    if abs(norm - 1) > 1e-6:
        raise ValueError(f"density of realisations integrates to {norm}, not 1")
    i = density.i_grid
    if callable(rho_of_i):
        rho = np.stack([np.asarray(rho_of_i(v), dtype=float) for v in i])
    else:
        rho = np.asarray(rho_of_i, dtype=float)
    if rho.shape[0] != i.size:
        raise ValueError(f"need one density per index point, got {rho.shape[0]}")
    out = np.trapezoid(density.delta[:, None] * rho, i, axis=0)
    return out / (out.sum() * dx)


def write_trace_csv(trace: EnsembleTrace, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "occupied_index"])
        for t, k in zip(trace.times, trace.occupied):
            w.writerow([repr(float(t)), int(k)])


def write_pdd_csv(trace: EnsembleTrace, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "rho_est", "rho_exact"])
        for row in zip(trace.x, trace.rho_ex_estimate, trace.rho_ex_exact):
            w.writerow([repr(float(v)) for v in row])
