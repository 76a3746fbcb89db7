"""Chaos borders and regime classification.

Energies are in the caller's units.  Borders that diverge (vanishing
perturbation, vanishing quantum border) come back as ``math.inf`` and are
listed in ``RegimeReport.flags`` so that sweeps never abort halfway.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .spectrum import Spectrum, SystemParams

REGIMES = ("no_chaos_below_quantum_border", "global_chaos", "intermittent_chaos",
           "asymptotic_regularity")
MODES = ("time_independent", "time_dependent", "above_barrier")
SWEEP_VARIABLES = ("E", "eps_p", "omega_p", "hbar", "K")
SWEEP_HEADER = ("E", "K", "E_c", "E_q", "K_c", "K_q", "regime")


@dataclass
class RegimeReport:
    E: float
    mode: str = "time_independent"
    E_c: Optional[float] = None
    E_c_semiclassical: Optional[float] = None
    E_q: Optional[float] = None
    E_q_star: Optional[float] = None
    delta_E: Optional[float] = None
    delta_E_c: Optional[float] = None
    K: Optional[float] = None
    K_c: Optional[float] = None
    K_q: Optional[float] = None
    omega_0c: Optional[float] = None
    T_p: Optional[float] = None
    T_s: Optional[float] = None
    domains: Optional[list] = None
    window_mode: Optional[str] = None
    regime: str = "asymptotic_regularity"
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {k: v for k, v in dataclasses.asdict(self).items() if v is not None}
        if self.domains is not None:
            d["domains"] = [list(iv) for iv in self.domains]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RegimeReport":
        d = dict(d)
        if d.get("domains") is not None:
            d["domains"] = [tuple(iv) for iv in d["domains"]]
        return cls(**d)


def characteristic_coupling(params: SystemParams) -> float:
    """Semiclassical value 2 pi^2 hbar^2 / (m d_p^2) of eps_p * g_p0."""
    return 2 * math.pi**2 * params.hbar**2 / (params.m * params.d_p**2)


def classical_border(spec: Spectrum, params: SystemParams, eps_star: float) -> float:
    """E_c = (d_eps)^2 / (4 eps_p g_p0) + eps*; inf when eps_p == 0."""
    coupling = params.eps_p * params.g_p0
    if coupling == 0:
        return math.inf
    return spec.delta_eps_s**2 / (4 * coupling) + eps_star


def classical_border_semiclassical(spec: Spectrum, params: SystemParams) -> float:
    return spec.omega_s**2 * params.d_p**2 * params.m / (8 * math.pi**2)


def perturbation_period(E: float, params: SystemParams) -> float:
    """Time to cross one perturbation period with all energy in free motion."""
    if not E > 0:
        raise ValueError(f"E must be > 0, got {E}")
    return params.d_p * math.sqrt(params.m / (2 * E))


def chaoticity_K(params: SystemParams, spec: Spectrum, E: float,
                 effective: bool = False) -> float:
    """Standard-map stochasticity K = m w^2 d_p^2 / (2E).

    With ``effective`` the anharmonic frequency omega_s / lambda is used, which
    is the K to compare against ``critical_K``.
    """
    if not E > 0:
        raise ValueError(f"E must be > 0, got {E}")
    w = spec.omega_s / params.lambda_anh if effective else spec.omega_s
    return params.m * w**2 * params.d_p**2 / (2 * E)


def critical_K(params: SystemParams) -> float:
    return (2 * math.pi / params.lambda_anh) ** 2


def quantum_border(spec: Spectrum, params: SystemParams) -> tuple[float, float]:
    """(E_q, E_q*): lowest eps* and the ceil(lambda)-th one."""
    idx = math.ceil(params.lambda_anh)
    need = max(2, idx + 1)
    if len(spec.eps_star_set) < need:
        raise ValueError(
            f"quantum border with lambda={params.lambda_anh:g} needs {need} levels, "
            f"spectrum has {len(spec.eps_star_set)}")
    return spec.eps_star_set[0], spec.eps_star_set[idx]


def quantum_K(spec: Spectrum, params: SystemParams) -> float:
    E_q = spec.eps_star_set[0]
    if E_q <= 0:
        return math.inf
    return spec.delta_eps_s**2 * params.d_p**2 * params.m / (2 * params.hbar**2 * E_q)


def window_width(spec: Spectrum, params: SystemParams,
                 eps_star: Optional[float] = None) -> tuple[float, float]:
    """(E_c - E_q, (d_eps)^2 / (4 eps_p g_p0)).

    The first value is exact for the given eps*; the second drops eps* - E_q.
    """
    E_q = spec.eps_star_set[0]
    eps_star = E_q if eps_star is None else eps_star
    coupling = params.eps_p * params.g_p0
    approx = math.inf if coupling == 0 else spec.delta_eps_s**2 / (4 * coupling)
    return classical_border(spec, params, eps_star) - E_q, approx


def domains_from_width(eps_star_set: Sequence[float], delta_E: float) -> list:
    """Chaos intervals (eps*_i, eps*_i + delta_E), overlapping ones merged."""
    out = []
    for lo in sorted(eps_star_set):
        hi = lo + delta_E
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def intermittent_domains(spec: Spectrum, params: SystemParams) -> list:
    """Chaos domains starting at each eps*, each delta_E wide.

    A single entry means the windows merged into one developed-chaos domain.
    """
    if not spec.eps_star_set:
        raise ValueError("eps_star_set is empty")
    delta_E, _ = window_width(spec, params)
    return domains_from_width(spec.eps_star_set, delta_E)


def time_dependent_borders(spec: Spectrum, params: SystemParams,
                           omega_p: Optional[float] = None) -> tuple[float, float]:
    """(omega_0c, K) for a time-periodic perturbation of frequency omega_p."""
    omega_p = params.omega_p if omega_p is None else omega_p
    if omega_p is None or not omega_p > 0:
        raise ValueError(f"omega_p must be > 0, got {omega_p}")
    omega_0c = spec.delta_eps_s / params.hbar
    K = critical_K(params) * (spec.omega_s / omega_p) ** 2
    return omega_0c, K


def above_barrier_border(params: SystemParams, eps_s: float) -> float:
    """Chaos/regularity boundary (d_p/d_s)^2 eps_s for quasi-free motion."""
    return (params.d_p / params.d_s) ** 2 * eps_s


def classify(E: float, spec: Spectrum, params: SystemParams,
             mode: str = "time_independent", eps_s: Optional[float] = None) -> RegimeReport:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if not E > 0:
        raise ValueError(f"E must be > 0, got {E}")
    rep = RegimeReport(E=E, mode=mode)
    rep.K_c = critical_K(params)
    rep.T_s = 2 * math.pi / spec.omega_s
    rep.E_c_semiclassical = classical_border_semiclassical(spec, params)
    rep.omega_0c = spec.delta_eps_s / params.hbar

    if mode == "time_dependent":
        # unset omega_p falls back to the frequency of free passage at E
        w_p = params.omega_p
        if w_p is None:
            w_p = 2 * math.pi / perturbation_period(E, params)
        rep.omega_0c, rep.K = time_dependent_borders(spec, params, w_p)
        rep.T_p = 2 * math.pi / w_p
        rep.regime = "global_chaos" if w_p < rep.omega_0c else "asymptotic_regularity"
        return rep

    rep.T_p = perturbation_period(E, params)
    rep.K = chaoticity_K(params, spec, E)

    if mode == "above_barrier":
        if eps_s is None:
            raise ValueError("above_barrier mode needs eps_s")
        rep.E_c = above_barrier_border(params, eps_s)
        rep.delta_E_c = rep.E_c / params.lambda_prime**2
        rep.regime = "global_chaos" if E < rep.E_c else "asymptotic_regularity"
        return rep

    rep.E_q, rep.E_q_star = quantum_border(spec, params)
    rep.E_c = classical_border(spec, params, rep.E_q)
    rep.delta_E, _ = window_width(spec, params)
    rep.delta_E_c = rep.E_c / params.lambda_prime**2
    rep.K_q = quantum_K(spec, params)
    rep.domains = intermittent_domains(spec, params)
    rep.window_mode = "merged" if len(rep.domains) == 1 else "intermittent"
    if math.isinf(rep.E_c):
        rep.flags.append("E_c_infinite")
    if math.isinf(rep.K_q):
        rep.flags.append("K_q_infinite")

    if E <= rep.E_q:
        rep.regime = "no_chaos_below_quantum_border"
    elif E < rep.E_c:
        rep.regime = "global_chaos"
    elif any(lo < E < hi for lo, hi in rep.domains):
        rep.regime = "intermittent_chaos"
    else:
        rep.regime = "asymptotic_regularity"
    return rep


def sweep(variable: str, values: Sequence[float], E: float, params: SystemParams,
          solve: Callable[[SystemParams], Spectrum], mode: str = "time_independent",
          eps_s: Optional[float] = None, workers: int = 1) -> list:
    """Classify every grid point; results come back in grid order.

    ``solve`` maps parameters to a spectrum; it is re-run only when the swept
    variable changes the spectrum (``hbar``, ``eps_p``).
    """
    if variable not in SWEEP_VARIABLES:
        raise ValueError(f"cannot sweep {variable!r}; choose from {SWEEP_VARIABLES}")
    base_spec = solve(params)

    def point(value):
        p, spec, energy = params, base_spec, E
        if variable == "E":
            energy = value
        elif variable == "K":
            energy = params.m * spec.omega_s**2 * params.d_p**2 / (2 * value)
        else:
            p = dataclasses.replace(params, **{variable: value})
            if variable in ("hbar", "eps_p"):
                spec = solve(p)
        return classify(energy, spec, p, mode=mode, eps_s=eps_s)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(point, values))
    return [point(v) for v in values]


def write_sweep_csv(reports: Sequence[RegimeReport], path) -> None:
    def fmt(v):
        return "" if v is None else repr(float(v))

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for r in reports:
            w.writerow([fmt(r.E), fmt(r.K), fmt(r.E_c), fmt(r.E_q), fmt(r.K_c),
                        fmt(r.K_q), r.regime])
