"""Realisation-multiplicity model of chaos in periodically perturbed 1D systems."""

from .borders import RegimeReport, classify
from .classical import MapParams, correspondence_check, iterate_standard_map
from .ensemble import NoiseModel, run
from .realisations import RealisationSet, build_jump_realisations
from .spectrum import PotentialSpec, Spectrum, SystemParams, solve_bound_states

__all__ = [
    "MapParams",
    "NoiseModel",
    "PotentialSpec",
    "RealisationSet",
    "RegimeReport",
    "Spectrum",
    "SystemParams",
    "build_jump_realisations",
    "classify",
    "correspondence_check",
    "iterate_standard_map",
    "run",
    "solve_bound_states",
]
