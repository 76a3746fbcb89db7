"""Chaotic jump tunnelling: realisation-probability sums over lowered barriers."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .realisations import RealisationSet


@dataclass
class TunnellingReport:
    beta: int
    eps_s: float | None = None
    p_beta: float | None = None
    P_beta: float | None = None
    A_set: list = field(default_factory=list)
    A_minus_set: list = field(default_factory=list)
    ties: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TunnellingReport":
        return cls(**d)


def barrier_height(rs: RealisationSet, i: int, beta: int) -> float:
    """Height of barrier ``beta`` in realisation ``i``; a destroyed barrier is 0."""
    r = rs.realisations[i]
    if not r.bound or beta >= len(r.barrier_heights):
        return 0.0
    return r.barrier_heights[beta]


def _check_beta(rs: RealisationSet, beta: int) -> None:
    n_barriers = max(len(r.barrier_heights) for r in rs.realisations)
    if not 0 <= beta < n_barriers:
        raise IndexError(f"barrier {beta} out of range: realisations carry {n_barriers}")


def transmission(rs: RealisationSet, beta: int, eps_s: float) -> TunnellingReport:
    """p_beta(eps_s): total probability of realisations whose barrier is below eps_s."""
    _check_beta(rs, beta)
    heights = [barrier_height(rs, i, beta) for i in range(rs.n_r)]
    members = [i for i, h in enumerate(heights) if h < eps_s]
    ties = [i for i, h in enumerate(heights) if h == eps_s]
    p = math.fsum(rs.alphas[i] for i in members)
    return TunnellingReport(beta=beta, eps_s=eps_s, p_beta=min(p, 1.0),
                            A_set=members, ties=ties)


def negative_jump_total(rs: RealisationSet, beta: int, unperturbed_height: float,
                        delta_eps_s: float) -> TunnellingReport:
    """P_beta: probability of barriers lowered by more than delta_eps_s."""
    if not delta_eps_s > 0:
        raise ValueError(f"delta_eps_s must be > 0, got {delta_eps_s}")
    _check_beta(rs, beta)
    cut = unperturbed_height - delta_eps_s
    members = [i for i in range(rs.n_r) if barrier_height(rs, i, beta) < cut]
    P = math.fsum(rs.alphas[i] for i in members)
    return TunnellingReport(beta=beta, P_beta=min(P, 1.0), A_minus_set=members)


def tunnelling_report(rs: RealisationSet, beta: int, eps_s: float,
                      unperturbed_height: float, delta_eps_s: float) -> TunnellingReport:
    t = transmission(rs, beta, eps_s)
    n = negative_jump_total(rs, beta, unperturbed_height, delta_eps_s)
    t.P_beta, t.A_minus_set = n.P_beta, n.A_minus_set
    return t
