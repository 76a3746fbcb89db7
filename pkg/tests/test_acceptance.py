"""Acceptance criteria, one test each, at their stated tolerances.

Every test appends a PASS/FAIL line to the summary printed at the end of the
pytest run, then asserts.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from qchaos import borders as B
from qchaos.classical import MapParams, iterate_standard_map
from qchaos.ensemble import NoiseModel, continuous_expectation, run
from qchaos.realisations import (
    Realisation,
    RealisationSet,
    build_jump_realisations,
    count_realisations,
    grouped_alphas,
    realisation_density,
    uniform_alphas,
)
from qchaos.spectrum import PotentialSpec, Spectrum, SystemParams, fd_levels, solve_bound_states
from qchaos.tunnelling import tunnelling_report

from conftest import ACCEPTANCE_LINES, gaussian_pdd

TWO_PI = 2 * math.pi


def record(n, title, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {n:>2}: {title} ({detail})")
    assert ok, detail


def log_uniform(rng, size, lo=1e-3, hi=1e3):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size))


def test_criterion_01_correspondence_anchor():
    K_c = B.critical_K(SystemParams(lambda_anh=TWO_PI))
    t0 = time.perf_counter()
    weak = iterate_standard_map(MapParams(0.5, 1000, 10_000, seed=0))
    strong = iterate_standard_map(MapParams(5.0, 1000, 10_000, seed=0))
    elapsed = time.perf_counter() - t0
    rel = abs(strong.D_est - 12.5) / 12.5
    ok = K_c == 1.0 and weak.bounded and not strong.bounded and rel <= 0.3 and elapsed < 60
    record(1, "standard-map anchor", ok,
           f"K_c={K_c}, K=0.5 bounded={weak.bounded}, K=5 D={strong.D_est:.3f} "
           f"({rel:.1%} off K^2/2), {elapsed:.1f}s")


def test_criterion_02_border_ordering():
    rng = np.random.default_rng(2)
    n = 10_000
    hbar, w, eps_p, d_p, m = (log_uniform(rng, n) for _ in range(5))
    violations = 0
    for i in range(n):
        p = SystemParams(m=m[i], hbar=hbar[i], eps_p=eps_p[i], d_p=d_p[i])
        spec = Spectrum.from_levels([hbar[i] * w[i] * (k + 0.5) for k in range(3)], p)
        E_q, _ = B.quantum_border(spec, p)
        E_c = B.classical_border(spec, p, spec.eps_star_set[0])
        violations += not E_c > E_q
    record(2, "E_c > E_q", violations == 0, f"{violations} violations in {n} draws")


def test_criterion_03_resonance_identity():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(100):
        m, hbar, d_p, w = log_uniform(rng, 4, 1e-2, 1e2)
        p0 = SystemParams(m=m, hbar=hbar, d_p=d_p)
        # coupling at its semiclassical value, eps* = 0
        p = SystemParams(m=m, hbar=hbar, d_p=d_p,
                         eps_p=B.characteristic_coupling(p0) / p0.g_p0)
        spec = Spectrum.from_levels([0.0, hbar * w], p)
        E_c = B.classical_border(spec, p, 0.0)
        T_s = TWO_PI / spec.omega_s
        worst = max(worst, abs(B.perturbation_period(E_c, p) - T_s) / T_s)
    record(3, "T_p(E_c) = T_s", worst <= 1e-12, f"max relative error {worst:.2e}")


def test_criterion_04_semiclassical_limit():
    pot = PotentialSpec("harmonic", -10.0, 10.0, grid_n=4096)
    E_q = []
    for k in range(11):
        p = SystemParams(hbar=2.0**-k)
        E_q.append(B.quantum_border(solve_bound_states(pot, p, 2), p)[0])
    decreasing = bool(np.all(np.diff(E_q) < 0))
    ratio = E_q[-1] / E_q[0]
    record(4, "E_q -> 0 as hbar -> 0", decreasing and ratio < 2.0**-9,
           f"strictly decreasing={decreasing}, ratio={ratio:.3e} vs {2.0**-9:.3e}")


def test_criterion_05_probability_algebra():
    rng = np.random.default_rng(5)
    worst = 0.0
    sets = 0
    for _ in range(300):
        counts = rng.integers(1, 1000, size=rng.integers(1, 200))
        for a in (grouped_alphas(counts), uniform_alphas(len(counts))):
            rs = RealisationSet(tuple(Realisation(i, 0.0) for i in range(len(a))), a)
            worst = max(worst, abs(math.fsum(rs.alphas) - 1))
            sets += 1
    pot = PotentialSpec("harmonic", -8.0, 8.0, grid_n=256)
    for n_p in (0, 2, 4, 6):
        rs = build_jump_realisations(pot, SystemParams(omega_p=0.3), n_p)
        worst = max(worst, abs(math.fsum(rs.alphas) - 1))
        sets += 1
    same = all(grouped_alphas([1] * n) == uniform_alphas(n) for n in range(1, 257))

    # bump fixture: narrow bumps of mass alpha_k at integer k versus the discrete mix
    x = np.linspace(-6, 8, 1401)
    dx = x[1] - x[0]
    alphas = grouped_alphas((2, 3, 5))
    centers = (0.0, 1.0, 2.0)
    width = 0.01

    def cdf(i):
        return sum(a * stats.norm.cdf(i, c, width) for a, c in zip(alphas, centers))

    dens = realisation_density(cdf, (-0.5, 2.5), n=60001)

    def rho(i):
        return gaussian_pdd(x, -2.0 + 2.0 * i, 0.8)

    cont = continuous_expectation(dens, rho, dx)
    disc = sum(a * rho(c) for a, c in zip(alphas, centers))
    l1 = float(np.sum(np.abs(cont - disc)) * dx)
    ok = worst <= 1e-12 and same and l1 < 1e-3
    record(5, "probability algebra", ok,
           f"max |sum-1|={worst:.1e} over {sets} sets, grouped(1..1)==uniform: {same}, "
           f"bump L1={l1:.2e}")


def _three_set():
    x = np.linspace(-5, 5, 201)
    rs = [Realisation(i, s, (), gaussian_pdd(x, c, 0.5), float(x[0]), x[1] - x[0])
          for i, (s, c) in enumerate(((0.0, 0.0), (1.0, 1.0), (-1.0, -1.0)))]
    return RealisationSet(tuple(rs), grouped_alphas((2, 3, 5)), group_counts=(2, 3, 5))


def test_criterion_06_ensemble_stationarity():
    rs = _three_set()
    tr = run(rs, NoiseModel(10.0, 5.0, "activated"), 200_000.0, 1.0, seed=6)
    counts = np.bincount(tr.occupied, minlength=rs.n_r)
    pval = stats.chisquare(counts, counts.sum() * np.asarray(rs.alphas)).pvalue
    quiet = run(rs, NoiseModel(0.0, 5.0, "activated"), 1_000_000.0, 1.0, seed=6)
    ok = tr.jump_count >= 100_000 and pval > 0.01 and quiet.jump_count == 0
    record(6, "ensemble stationarity", ok,
           f"{tr.jump_count} jumps, chi2 p={pval:.3f}; sigma=0: {quiet.jump_count} jumps "
           f"in {quiet.occupied.size - 1} steps")


def test_criterion_07_tunnelling_oracle():
    rng = np.random.default_rng(7)
    mismatches = 0
    for _ in range(1000):
        n = int(rng.integers(1, 65))
        # coarse heights force frequent ties with the test energies
        heights = np.round(rng.uniform(0, 5, n), 1)
        counts = rng.integers(1, 20, n)
        alphas = grouped_alphas(counts)
        rs = RealisationSet(tuple(Realisation(i, 0.0, (float(h),)) for i, h in
                                  enumerate(heights)), alphas)
        eps = float(np.round(rng.uniform(0, 5), 1))
        top, d = float(np.round(rng.uniform(0, 5), 1)), float(rng.uniform(0.05, 2))
        A = [i for i, h in enumerate(heights) if h < eps]
        A_minus = [i for i, h in enumerate(heights) if h < top - d]
        p = min(float(sum((Fraction(alphas[i]) for i in A), Fraction(0))), 1.0)
        P = min(float(sum((Fraction(alphas[i]) for i in A_minus), Fraction(0))), 1.0)
        rep = tunnelling_report(rs, 0, eps, top, d)
        mismatches += (rep.A_set != A or rep.A_minus_set != A_minus
                       or rep.p_beta != p or rep.P_beta != P)
    record(7, "tunnelling matches enumeration", mismatches == 0,
           f"{mismatches} mismatches in 1000 sets")


def test_criterion_08_quantized_chaoticity():
    pot = PotentialSpec("harmonic", -10.0, 10.0, grid_n=2048)
    p = SystemParams()
    spec = solve_bound_states(pot, p, 10)
    n_p = 6
    grid = np.linspace(0.01, 11.0, 20_001)
    cell = grid[1] - grid[0]
    N = np.array([count_realisations(E, spec, n_p) for E in grid])
    steps = np.nonzero(np.diff(N))[0]
    unit = bool(np.all(np.diff(N) >= 0) and np.all(np.diff(N) <= 1))
    capped = N.max() == n_p and N.min() == 1
    expected = [e for e in spec.eps_star_set if grid[0] < e < grid[-1]][: n_p - 1]
    located = len(steps) == len(expected) and all(
        abs(grid[s] - e) <= cell for s, e in zip(steps, expected))
    record(8, "N_R(E) staircase", unit and capped and located,
           f"{len(steps)} unit steps, each within one cell ({cell:.1e}) of eps*: {located}, "
           f"max N_R={N.max()} (cap {n_p})")


def test_criterion_09_intermittency():
    pot = PotentialSpec("harmonic", -10.0, 10.0, grid_n=2048)
    spec = solve_bound_states(pot, SystemParams(), 10)
    gaps = np.diff(spec.eps_star_set)
    coupling_ok, widths_ok, disjoint = True, True, True
    for eps_p in (spec.delta_eps_s, 2.0, 5.0, 40.0):
        p = SystemParams(eps_p=eps_p)
        coupling_ok &= p.eps_p * p.g_p0 >= spec.delta_eps_s
        dE, _ = B.window_width(spec, p)
        dom = B.intermittent_domains(spec, p)
        disjoint &= len(dom) == len(spec.eps_star_set) and all(
            a[1] < b[0] for a, b in zip(dom, dom[1:]))
        widths_ok &= all(abs((hi - lo) - dE) <= 1e-12 * hi for lo, hi in dom)

    # sweep the coupling so delta_E falls through the level gaps
    eps_grid = np.geomspace(0.05, 5.0, 400)
    modes, dEs = [], []
    for eps_p in eps_grid:
        p = SystemParams(eps_p=eps_p)
        rep = B.classify(spec.eps_star_set[0] * 1.0001, spec, p)
        modes.append(rep.window_mode)
        dEs.append(rep.delta_E)
    switches = [i for i in range(1, len(modes)) if modes[i] != modes[i - 1]]
    single = (len(switches) == 1 and modes[0] == "merged"
              and modes[-1] == "intermittent")
    at_gap = single and dEs[switches[0]] < gaps.min() <= dEs[switches[0] - 1]
    record(9, "intermittency structure",
           coupling_ok and widths_ok and disjoint and single and at_gap,
           f"disjoint={disjoint}, widths=delta_E: {widths_ok}, switches={len(switches)}, "
           f"threshold bracket delta_E in ({dEs[switches[0]] if switches else float('nan'):.4f}, "
           f"{dEs[switches[0] - 1] if switches else float('nan'):.4f}] vs min gap {gaps.min():.4f}")


def test_criterion_10_eigensolver_accuracy():
    pot = PotentialSpec("harmonic", -10.0, 10.0, grid_n=4096)
    spec = solve_bound_states(pot, SystemParams(), 10)
    exact = np.arange(10) + 0.5
    err = float(np.max(np.abs(np.array(spec.levels) - exact) / exact))
    n = 1024
    e1, e2, e3 = (fd_levels(pot, 1.0, 1.0, 10, g) for g in (n, 2 * n + 1, 4 * n + 3))
    ratio = np.abs(e1 - e2) / np.abs(e2 - e3)
    order_ok = bool(np.all(np.abs(ratio - 4) < 0.1))
    record(10, "harmonic levels and O(h^2)", err <= 1e-6 and order_ok,
           f"max relative error {err:.1e}, doubling ratios {ratio.min():.3f}..{ratio.max():.3f}")
