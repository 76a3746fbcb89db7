"""Realisation sets: probabilities, counting against energy, jump configurations."""

from __future__ import annotations

import bisect
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .spectrum import PotentialSpec, Spectrum, SystemParams, eigenstates

ALPHA_TOL = 1e-12
PDD_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Realisation:
    index: int
    ep_amplitude_shift: float
    barrier_heights: tuple = ()
    pdd: Optional[np.ndarray] = None
    x0: float = 0.0
    dx: float = 1.0
    bound: bool = True

    def __post_init__(self):
        if self.pdd is not None:
            pdd = np.asarray(self.pdd, dtype=float)
            if np.any(pdd < 0):
                raise ValueError(f"realisation {self.index}: negative density")
            norm = pdd.sum() * self.dx
            if abs(norm - 1) > PDD_TOL:
                raise ValueError(f"realisation {self.index}: density integrates to {norm}")
            object.__setattr__(self, "pdd", pdd)

    def __eq__(self, other):
        if not isinstance(other, Realisation):
            return NotImplemented
        same_pdd = (self.pdd is None and other.pdd is None) or (
            self.pdd is not None and other.pdd is not None
            and np.array_equal(self.pdd, other.pdd))
        return (self.index == other.index
                and self.ep_amplitude_shift == other.ep_amplitude_shift
                and tuple(self.barrier_heights) == tuple(other.barrier_heights)
                and self.x0 == other.x0 and self.dx == other.dx
                and self.bound == other.bound and same_pdd)

    def to_dict(self) -> dict:
        d = {"index": self.index, "shift": self.ep_amplitude_shift,
             "barrier_heights": list(self.barrier_heights), "bound": self.bound}
        if self.pdd is not None:
            d["pdd_grid"] = {"x0": self.x0, "dx": self.dx, "values": self.pdd.tolist()}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Realisation":
        grid = d.get("pdd_grid")
        return cls(
            index=d["index"],
            ep_amplitude_shift=d.get("shift", 0.0),
            barrier_heights=tuple(d.get("barrier_heights", ())),
            pdd=None if grid is None else np.asarray(grid["values"], dtype=float),
            x0=0.0 if grid is None else grid["x0"],
            dx=1.0 if grid is None else grid["dx"],
            bound=d.get("bound", True),
        )


@dataclass(frozen=True)
class RealisationSet:
    realisations: tuple
    alphas: tuple
    group_counts: Optional[tuple] = None
    omega_domain: Optional[tuple] = None
    n_r: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "realisations", tuple(self.realisations))
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        n = len(self.realisations)
        object.__setattr__(self, "n_r", n)
        if n < 1:
            raise ValueError("a realisation set needs at least one realisation")
        if len(self.alphas) != n:
            raise ValueError(f"{len(self.alphas)} probabilities for {n} realisations")
        a = np.asarray(self.alphas)
        if np.any(a < 0) or np.any(a > 1):
            raise ValueError("probabilities must lie in [0, 1]")
        if abs(math.fsum(self.alphas) - 1) > ALPHA_TOL:
            raise ValueError(f"probabilities sum to {math.fsum(self.alphas)!r}, not 1")
        if self.group_counts is not None:
            object.__setattr__(self, "group_counts", tuple(self.group_counts))
            expected = grouped_alphas(self.group_counts)
            if len(expected) != n or np.any(np.abs(np.asarray(expected) - a) > 1e-15):
                raise ValueError("alphas disagree with group_counts")

    @classmethod
    def uniform(cls, realisations: Sequence[Realisation]) -> "RealisationSet":
        return cls(tuple(realisations), uniform_alphas(len(realisations)))

    def shifts(self) -> np.ndarray:
        return np.array([r.ep_amplitude_shift for r in self.realisations])

    def to_dict(self) -> dict:
        return {
            "n_r": self.n_r,
            "alphas": list(self.alphas),
            "group_counts": None if self.group_counts is None else list(self.group_counts),
            "realisations": [r.to_dict() for r in self.realisations],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RealisationSet":
        rs = cls(
            realisations=tuple(Realisation.from_dict(r) for r in d["realisations"]),
            alphas=tuple(d["alphas"]),
            group_counts=None if d.get("group_counts") is None else tuple(d["group_counts"]),
        )
        if "n_r" in d and d["n_r"] != rs.n_r:
            raise ValueError(f"n_r={d['n_r']} but {rs.n_r} realisations listed")
        return rs


@dataclass(frozen=True)
class RealisationDensity:
    """Tabulated density of realisations over a continuous index domain."""

    i_grid: np.ndarray
    delta: np.ndarray

    @property
    def omega(self) -> tuple:
        return float(self.i_grid[0]), float(self.i_grid[-1])

    def integral(self, lo: Optional[float] = None, hi: Optional[float] = None) -> float:
        i, d = self.i_grid, self.delta
        if lo is not None or hi is not None:
            lo = i[0] if lo is None else lo
            hi = i[-1] if hi is None else hi
            fine = np.union1d(i[(i > lo) & (i < hi)], [lo, hi])
            return float(np.trapezoid(np.interp(fine, i, d), fine))
        return float(np.trapezoid(d, i))


def count_realisations(E: float, spec: Spectrum, n_p: int) -> int:
    """Number of realisations at energy ``E``.

    One realisation below every eps*, one more for each eps* passed, capped at
    ``n_p``.  The result is a unit-step staircase in E.
    """
    if not E > 0:
        raise ValueError(f"E must be > 0, got {E}")
    if n_p < 1:
        raise ValueError(f"n_p must be >= 1, got {n_p}")
    if not spec.eps_star_set:
        raise ValueError("eps_star_set is empty")
    passed = bisect.bisect_left(spec.eps_star_set, E)
    return min(1 + passed, n_p)


def uniform_alphas(n_r: int) -> tuple:
    if n_r < 1:
        raise ValueError(f"n_r must be >= 1, got {n_r}")
    return (1.0 / n_r,) * n_r


def grouped_alphas(group_counts: Sequence[int]) -> tuple:
    """alpha_i = N_i / sum(N), evaluated in exact rationals before rounding."""
    counts = [int(c) for c in group_counts]
    if not counts:
        raise ValueError("group_counts is empty")
    if any(c < 1 for c in counts):
        raise ValueError(f"group counts must be >= 1, got {counts}")
    total = sum(counts)
    return tuple(float(Fraction(c, total)) for c in counts)


def group_by_discernibility(energies: Sequence[float], delta_eps_s: float) -> list:
    """Cluster realisations whose border energies differ by < delta_eps_s / 10.

    Returns index groups in ascending energy order; neighbours are chained.
    """
    if not energies:
        return []
    threshold = delta_eps_s / 10
    order = np.argsort(energies, kind="stable")
    groups = [[int(order[0])]]
    for prev, cur in zip(order[:-1], order[1:]):
        if energies[cur] - energies[prev] < threshold:
            groups[-1].append(int(cur))
        else:
            groups.append([int(cur)])
    return groups


def jump_shifts(params: SystemParams, n_p: int, omega_p: float,
                laddered: bool = True) -> list:
    """EP amplitude shifts: 0 for the main group, then +/- pairs.

    Laddered pairs carry k * hbar * omega_p * g for k = 1..n_p/2; the flat
    variant gives every pair the same +/- hbar * omega_p * g.
    """
    if n_p < 0 or n_p % 2:
        raise ValueError(f"n_p must be a non-negative even number, got {n_p}")
    quantum = params.hbar * omega_p * params.g_jump
    shifts = [0.0]
    for k in range(1, n_p // 2 + 1):
        step = k * quantum if laddered else quantum
        shifts += [step, -step]
    return shifts


def effective_omega_p(params: SystemParams, energy: Optional[float]) -> float:
    if params.omega_p is not None:
        return params.omega_p
    if energy is None or not energy > 0:
        raise ValueError("omega_p unset: an energy > 0 is needed for 2 pi sqrt(2E/m) / d_p")
    return 2 * math.pi * math.sqrt(2 * energy / params.m) / params.d_p


def barrier_mask(v0: np.ndarray) -> np.ndarray:
    """Barrier region of V0: points strictly above its median."""
    return v0 > np.median(v0)


def barrier_heights(v: np.ndarray, mask: np.ndarray) -> tuple:
    """Maximum of ``v`` over each contiguous barrier run, left to right."""
    edges = np.flatnonzero(np.diff(np.concatenate(([0], mask.astype(int), [0]))))
    return tuple(float(v[a:b].max()) for a, b in zip(edges[::2], edges[1::2]))


def build_jump_realisations(pot: PotentialSpec, params: SystemParams, n_p: int,
                            energy: Optional[float] = None, laddered: bool = True,
                            level_index: int = 0) -> RealisationSet:
    """Main realisation plus n_p/2 pairs of shifted-EP realisations.

    Each shift is added to V0 on its barrier region only, so a negative shift
    can lower or remove a barrier.  The density of each realisation is that of
    bound level ``level_index`` of the shifted potential; a realisation with
    no such bound level is kept but flagged unbound, without density or
    barriers.
    """
    omega_p = effective_omega_p(params, energy)
    shifts = jump_shifts(params, n_p, omega_p, laddered)
    x = pot.grid()
    dx = float(x[1] - x[0])
    v0 = pot.potential(x, params.m)
    mask = barrier_mask(v0)
    out = []
    for i, s in enumerate(shifts):
        v = v0 + s * mask
        _, w, psi = eigenstates(pot, params.m, params.hbar, level_index + 1, v=v)
        if len(w) > level_index and w[level_index] < pot.bound_ceiling(v):
            rho = psi[:, level_index] ** 2
            rho = rho / (rho.sum() * dx)
            out.append(Realisation(i, s, barrier_heights(v, mask), rho, float(x[0]), dx))
        else:
            warnings.warn(f"realisation {i} (shift {s:g}) has no bound level {level_index}")
            out.append(Realisation(i, s, (), None, float(x[0]), dx, bound=False))
    return RealisationSet.uniform(out)


def realisation_density(alpha: Callable[[np.ndarray], np.ndarray] | np.ndarray,
                        omega: tuple, n: int = 2001) -> RealisationDensity:
    """Density of realisations d(alpha)/di tabulated on ``n`` points of ``omega``.

    ``alpha`` is the cumulative probability as a function of the continuous
    index (callable, or values already sampled on the grid).
    """
    lo, hi = omega
    if not lo < hi:
        raise ValueError(f"empty index domain {omega}")
    grid = np.linspace(lo, hi, n)
    a = np.asarray(alpha(grid) if callable(alpha) else alpha, dtype=float)
    if a.shape != grid.shape:
        raise ValueError(f"alpha has shape {a.shape}, expected {grid.shape}")
    delta = np.gradient(a, grid, edge_order=2)
    if np.min(delta) < -1e-9:
        raise ValueError("cumulative alpha is not monotone: negative density of realisations")
    delta = np.clip(delta, 0.0, None)
    total = np.trapezoid(delta, grid)
    if not total > 0:
        raise ValueError("density of realisations integrates to zero")
    return RealisationDensity(grid, delta / total)
