"""Standard-map reference dynamics for the classical side of the correspondence."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .borders import chaoticity_K, critical_K
from .spectrum import Spectrum, SystemParams

CHUNK = 256  # orbits per RNG substream; fixed so results ignore the worker count
FUZZ_BAND = (0.7, 1.3)
BOUNDED_FRACTION = 0.01


@dataclass(frozen=True)
class MapParams:
    K: float
    n_orbits: int = 1000
    n_steps: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.K < 0:
            raise ValueError(f"K must be >= 0, got {self.K}")
        if self.n_orbits < 1 or self.n_steps < 1:
            raise ValueError("n_orbits and n_steps must be >= 1")


@dataclass(frozen=True, eq=False)
class DiffusionResult:
    K: float
    var_p_series: np.ndarray
    D_est: float
    bounded: bool

    @property
    def quasilinear(self) -> float:
        return self.K**2 / 2


@dataclass
class CorrespondenceVerdict:
    K: float
    K_c: float
    D_est: float
    bounded: bool
    agrees: bool | None
    verdict: str
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"K": self.K, "K_c": self.K_c, "D_est": self.D_est,
                "bounded": self.bounded, "agrees": self.agrees, "verdict": self.verdict}

    @classmethod
    def from_dict(cls, d: dict) -> "CorrespondenceVerdict":
        return cls(**{k: d[k] for k in ("K", "K_c", "D_est", "bounded", "agrees", "verdict")})


def _moments(K: float, n_steps: int, seq: np.random.SeedSequence, n: int):
    """Sum and sum of squares of unwrapped momentum after every kick."""
    theta = np.random.default_rng(seq).uniform(0, 2 * np.pi, n)
    p = np.zeros(n)
    s1 = np.empty(n_steps)
    s2 = np.empty(n_steps)
    for t in range(n_steps):
        p += K * np.sin(theta)
        theta = np.mod(theta + p, 2 * np.pi)
        s1[t] = p.sum()
        s2[t] = p @ p
    return s1, s2


def iterate_standard_map(params: MapParams, workers: int = 1) -> DiffusionResult:
    """Kick p' = p + K sin(theta), theta' = theta + p' on a uniform-angle ensemble.

    All orbits start at p = 0.  D_est is the least-squares slope of var(p)
    over the last half of the run; the motion is called bounded when that slope
    is at most 1% of the quasilinear rate K^2/2.
    """
    sizes = [min(CHUNK, params.n_orbits - k) for k in range(0, params.n_orbits, CHUNK)]
    seqs = np.random.SeedSequence(params.seed).spawn(len(sizes))
    jobs = list(zip(seqs, sizes))

    def one(job):
        return _moments(params.K, params.n_steps, *job)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, jobs))
    else:
        parts = [one(j) for j in jobs]
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    n = params.n_orbits
    var = np.maximum(s2 / n - (s1 / n) ** 2, 0.0)
    steps = np.arange(1, params.n_steps + 1)
    tail = slice(params.n_steps // 2, None)
    if params.n_steps - params.n_steps // 2 >= 2:
        slope = float(np.polyfit(steps[tail], var[tail], 1)[0])
    else:
        slope = float(var[-1] / params.n_steps)
    D = max(slope, 0.0)
    return DiffusionResult(params.K, var, D, bool(D <= BOUNDED_FRACTION * params.K**2 / 2))


def correspondence_check(spec: Spectrum, params: SystemParams, E: float,
                         n_orbits: int = 1000, n_steps: int = 10_000, seed: int = 0,
                         workers: int = 1) -> CorrespondenceVerdict:
    """Compare the quantum chaos criterion K > K_c with the standard map at that K.

    K uses the anharmonic frequency omega_s / lambda, which puts the threshold
    at (2 pi / lambda)^2.  Near the threshold the map verdict is not decisive,
    so K / K_c inside FUZZ_BAND yields ``agrees = None``.
    """
    K = chaoticity_K(params, spec, E, effective=True)
    K_c = critical_K(params)
    res = iterate_standard_map(MapParams(K, n_orbits, n_steps, seed), workers=workers)
    lo, hi = FUZZ_BAND
    if lo <= K / K_c <= hi:
        agrees, verdict = None, "indeterminate-by-design"
    else:
        agrees = (not res.bounded) == (K > K_c)
        verdict = "agrees" if agrees else "disagrees"
    return CorrespondenceVerdict(K, K_c, res.D_est, res.bounded, agrees, verdict)


def energy_for_K(spec: Spectrum, params: SystemParams, K: float) -> float:
    """Inverse of the effective-frequency K(E)."""
    w = spec.omega_s / params.lambda_anh
    return params.m * w**2 * params.d_p**2 / (2 * K)


def write_variance_csv(res: DiffusionResult, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "var_p"])
        for t, v in enumerate(res.var_p_series, start=1):
            w.writerow([t, repr(float(v))])


def near_accelerator_mode(K: float, width: float = 0.5) -> bool:
    """True when K sits within ``width`` of a nonzero multiple of 2 pi."""
    n = round(K / (2 * math.pi))
    return n >= 1 and abs(K - 2 * math.pi * n) < width
