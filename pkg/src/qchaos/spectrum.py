"""Bound-state spectrum of the unperturbed 1D potential.

Everything downstream (borders, realisation counting, jump realisations)
consumes the level set produced here.  Units are whatever the caller uses
consistently; nothing is converted.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal


class BoundStateError(RuntimeError):
    """Raised when a potential supports fewer bound states than requested."""


@dataclass(frozen=True)
class SystemParams:
    m: float = 1.0
    hbar: float = 1.0
    d_p: float = 2 * math.pi
    d_s: float = 1.0
    eps_p: float = 1.0
    g_jump: int = 1
    lambda_anh: float = 1.0
    lambda_prime: float = 1.0
    omega_p: Optional[float] = None

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"m must be > 0, got {self.m}")
        if not self.hbar > 0:
            raise ValueError(f"hbar must be > 0, got {self.hbar}")
        if not self.d_p > 0:
            raise ValueError(f"d_p must be > 0, got {self.d_p}")
        if not self.d_s > 0:
            raise ValueError(f"d_s must be > 0, got {self.d_s}")
        if not self.eps_p >= 0:
            raise ValueError(f"eps_p must be >= 0, got {self.eps_p}")
        if self.lambda_anh < 1:
            raise ValueError(f"lambda_anh must be >= 1, got {self.lambda_anh}")
        if self.lambda_prime < 1:
            raise ValueError(f"lambda_prime must be >= 1, got {self.lambda_prime}")
        if int(self.g_jump) != self.g_jump or self.g_jump == 0:
            raise ValueError(f"g_jump must be a nonzero integer, got {self.g_jump}")
        if self.omega_p is not None and not self.omega_p > 0:
            raise ValueError(f"omega_p must be > 0 when given, got {self.omega_p}")

    @property
    def g_p0(self) -> float:
        """Perturbation wavenumber 2*pi/d_p."""
        return 2 * math.pi / self.d_p


@dataclass(frozen=True)
class PotentialSpec:
    """Unperturbed potential on a bounded Dirichlet box.

    ``kind`` is one of ``"harmonic"`` (needs ``omega``), ``"table"`` (needs
    ``x_table``/``v_table``, linearly interpolated) or ``"periodic"`` (needs
    ``d_s`` and ``amplitude``; V0 = amplitude * (1 - cos(2 pi x / d_s)) / 2).
    ``grid_n`` counts interior mesh points.
    """

    kind: str
    x_min: float
    x_max: float
    grid_n: int = 2048
    omega: float = 1.0
    x_table: Optional[tuple] = None
    v_table: Optional[tuple] = None
    d_s: float = 1.0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in ("harmonic", "table", "periodic"):
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.grid_n < 64:
            raise ValueError(f"grid_n must be >= 64, got {self.grid_n}")
        if not self.x_min < self.x_max:
            raise ValueError(f"need x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if self.kind == "table":
            if self.x_table is None or self.v_table is None:
                raise ValueError("table potential needs x_table and v_table")
            xt = np.asarray(self.x_table, dtype=float)
            vt = np.asarray(self.v_table, dtype=float)
            if xt.shape != vt.shape or xt.size < 2:
                raise ValueError("x_table and v_table must have equal length >= 2")
            if not np.all(np.isfinite(vt)) or not np.all(np.isfinite(xt)):
                raise ValueError("tabulated potential contains non-finite values")
            if np.any(np.diff(xt) <= 0):
                raise ValueError("x_table must be strictly ascending")
        if self.kind == "periodic" and not self.d_s > 0:
            raise ValueError(f"periodic potential needs d_s > 0, got {self.d_s}")

    @classmethod
    def from_csv(cls, path, grid_n: int = 2048) -> "PotentialSpec":
        """Two-column ``x, V0(x)`` file; lines starting with '#' are skipped."""
        xs, vs = [], []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    xs.append(float(row[0]))
                    vs.append(float(row[1]))
                except (ValueError, IndexError) as exc:
                    raise ValueError(f"{path}: malformed row {row!r}") from exc
        if len(xs) < 2:
            raise ValueError(f"{path}: need at least two rows")
        return cls(kind="table", x_min=xs[0], x_max=xs[-1], grid_n=grid_n,
                   x_table=tuple(xs), v_table=tuple(vs))

    def potential(self, x, m: float = 1.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "harmonic":
            v = 0.5 * m * self.omega**2 * x**2
        elif self.kind == "periodic":
            v = 0.5 * self.amplitude * (1 - np.cos(2 * np.pi * x / self.d_s))
        else:
            v = np.interp(x, self.x_table, self.v_table)
        if not np.all(np.isfinite(v)):
            raise ValueError("potential has non-finite values on the grid")
        return v

    def grid(self, n: Optional[int] = None) -> np.ndarray:
        """Interior points of the Dirichlet box (boundaries excluded)."""
        n = self.grid_n if n is None else n
        return np.linspace(self.x_min, self.x_max, n + 2)[1:-1]

    def bound_ceiling(self, v: np.ndarray) -> float:
        """Energy below which a box eigenstate counts as bound."""
        if self.kind == "periodic":
            return float(np.max(v))
        return float(min(v[0], v[-1]))

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "x_min": self.x_min, "x_max": self.x_max,
             "grid_n": self.grid_n}
        if self.kind == "harmonic":
            d["omega"] = self.omega
        elif self.kind == "periodic":
            d.update(d_s=self.d_s, amplitude=self.amplitude)
        else:
            d.update(x_table=list(self.x_table), v_table=list(self.v_table))
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PotentialSpec":
        d = dict(d)
        for key in ("x_table", "v_table"):
            if d.get(key) is not None:
                d[key] = tuple(d[key])
        return cls(**d)


@dataclass(frozen=True)
class Spectrum:
    levels: tuple
    delta_eps_s: float
    omega_s: float
    eps_s0: float
    eps_star_set: tuple
    zone_data: Optional[dict] = field(default=None)

    def __post_init__(self):
        lv = np.asarray(self.levels, dtype=float)
        if lv.size < 1 or np.any(np.diff(lv) <= 0):
            raise ValueError("levels must be non-empty and strictly ascending")
        if not self.delta_eps_s > 0:
            raise ValueError(f"delta_eps_s must be > 0, got {self.delta_eps_s}")
        if np.any(np.diff(self.eps_star_set) < 0):
            raise ValueError("eps_star_set must be ascending")

    @classmethod
    def from_levels(cls, levels, params: SystemParams, reference_index: int = 0,
                    star_phase: float = 0.0, delta_eps_s: Optional[float] = None,
                    zone_data: Optional[dict] = None) -> "Spectrum":
        """Assemble a spectrum from known levels.

        ``star_phase`` is the unknown sin^2 factor in eps* = s*eps_p*g_p0 + eps_n;
        ``delta_eps_s`` overrides the gap above ``reference_index``.
        """
        levels = tuple(float(v) for v in levels)
        if not 0.0 <= star_phase <= 1.0:
            raise ValueError(f"star_phase must lie in [0, 1], got {star_phase}")
        if delta_eps_s is None:
            if len(levels) < reference_index + 2:
                raise ValueError(
                    f"need at least {reference_index + 2} levels for the gap above "
                    f"level {reference_index}, got {len(levels)}")
            delta_eps_s = levels[reference_index + 1] - levels[reference_index]
        offset = star_phase * params.eps_p * params.g_p0
        return cls(
            levels=levels,
            delta_eps_s=float(delta_eps_s),
            omega_s=float(delta_eps_s) / params.hbar,
            eps_s0=levels[0],
            eps_star_set=tuple(offset + v for v in levels),
            zone_data=zone_data,
        )

    def to_dict(self) -> dict:
        return {
            "levels": list(self.levels),
            "delta_eps_s": self.delta_eps_s,
            "omega_s": self.omega_s,
            "eps_s0": self.eps_s0,
            "eps_star_set": list(self.eps_star_set),
            "zone_data": self.zone_data,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Spectrum":
        return cls(levels=tuple(d["levels"]), delta_eps_s=d["delta_eps_s"],
                   omega_s=d["omega_s"], eps_s0=d["eps_s0"],
                   eps_star_set=tuple(d["eps_star_set"]), zone_data=d.get("zone_data"))


def _fd_eigen(v: np.ndarray, h: float, m: float, hbar: float, n: int,
              vectors: bool = False):
    # 3-point Laplacian, Dirichlet walls just outside the interior grid
    t = hbar**2 / (2 * m * h**2)
    diag = v + 2 * t
    off = np.full(v.size - 1, -t)
    n = min(n, v.size)
    return eigh_tridiagonal(diag, off, select="i", select_range=(0, n - 1),
                            eigvals_only=not vectors)


def eigenstates(pot: PotentialSpec, m: float, hbar: float, n: int,
                v: Optional[np.ndarray] = None):
    """Lowest ``n`` box eigenpairs on the base grid.

    Returns ``(x, energies, psi)`` with ``psi[:, k]`` normalised so that
    ``sum(|psi|^2) * dx == 1``.  ``v`` overrides the sampled potential.
    """
    x = pot.grid()
    h = x[1] - x[0]
    if v is None:
        v = pot.potential(x, m)
    w, psi = _fd_eigen(np.asarray(v, dtype=float), h, m, hbar, n, vectors=True)
    psi = psi / np.sqrt(h)
    return x, w, psi


def fd_levels(pot: PotentialSpec, m: float, hbar: float, n: int,
              grid_n: Optional[int] = None) -> np.ndarray:
    """Raw second-order finite-difference levels, no extrapolation."""
    x = pot.grid(grid_n)
    return _fd_eigen(pot.potential(x, m), x[1] - x[0], m, hbar, n)


def solve_bound_states(pot: PotentialSpec, params: SystemParams, n_levels: int,
                       reference_index: int = 0, star_phase: float = 0.0,
                       richardson: bool = True) -> Spectrum:
    """Lowest ``n_levels`` bound states of -(hbar^2/2m) psi'' + V0 psi = eps psi.

    The 3-point scheme is O(h^2); with ``richardson`` the levels from grids of
    spacing h and h/2 are combined as (4 e(h/2) - e(h)) / 3, which cancels the
    leading error term.
    """
    if n_levels < 1:
        raise ValueError(f"n_levels must be >= 1, got {n_levels}")
    x = pot.grid()
    v = pot.potential(x, params.m)
    ceiling = pot.bound_ceiling(v)
    coarse = _fd_eigen(v, x[1] - x[0], params.m, params.hbar, n_levels)
    if richardson:
        fine_n = 2 * pot.grid_n + 1
        xf = pot.grid(fine_n)
        fine = _fd_eigen(pot.potential(xf, params.m), xf[1] - xf[0],
                         params.m, params.hbar, n_levels)
        levels = (4 * fine - coarse) / 3
    else:
        fine = coarse
        levels = coarse
    found = int(np.sum(fine < ceiling))
    if found < n_levels:
        raise BoundStateError(
            f"potential supports only {found} bound state(s) on "
            f"[{pot.x_min}, {pot.x_max}], {n_levels} requested")
    zone = None
    if pot.kind == "periodic":
        zone = {"d_s": pot.d_s, "delta_k_s": math.pi / pot.d_s}
    return Spectrum.from_levels(levels, params, reference_index=reference_index,
                                star_phase=star_phase, zone_data=zone)


def effective_frequency(spec: Spectrum, params: SystemParams) -> tuple[float, float]:
    """Anharmonic effective frequency omega_s / lambda and the period 2 pi / omega_s."""
    return spec.omega_s / params.lambda_anh, 2 * math.pi / spec.omega_s


def zone_separation(pot: PotentialSpec, params: SystemParams, zone_index: int) -> float:
    """Quasi-free zone-extremum spacing 2 hbar^2 k_s dk_s / m with k_s = n pi / d_s.

    Only meaningful well above the barriers of a periodic V0.
    """
    if pot.kind != "periodic":
        raise ValueError("zone_separation needs a periodic potential")
    if zone_index < 1:
        raise ValueError(f"zone_index must be >= 1, got {zone_index}")
    dk = math.pi / pot.d_s
    k_s = zone_index * dk
    return 2 * params.hbar**2 * k_s * dk / params.m


def write_levels_csv(spec: Spectrum, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "level", "eps_star"])
        for i, (lv, es) in enumerate(zip(spec.levels, spec.eps_star_set)):
            w.writerow([i, repr(float(lv)), repr(float(es))])
