"""Acceptance suite: one test per verification criterion, each printing a
PASS/FAIL line.  Tolerances are fixed here, not tuned at run time.

The vacuum-input transient entanglement bound deserves one note.  The
literal bound "no entanglement while eta1 <= max(nbar0 Gamma, Gamma/2)"
carries a hidden over-amplification hypothesis (eta1 > Gamma/2); dropping
the hypothesis contradicts the settled-regime results asserted by
`test_eof_map_threshold_boundary` (for nbar0 < 1/2 the window
nbar0 Gamma < eta1 <= Gamma/2 is entangled, with a positive long-time
value).  The consistent criterion across both regimes is
eta1 / Gamma > nbar0; that is what `test_eof_transient_curves` asserts, and
`test_eof_transient_literal_overamplified_bound` documents the failure of
the literal bound as a strict xfail.
"""

import numpy as np
import pytest

from optevo import (
    SystemParams,
    eval_gaussian_chi,
    evolve_chi_amp_phase,
    evolve_chi_amplification,
    evolve_chi_amplitude_damping,
    evolve_chi_general,
    evolve_chi_phase_damping,
    evolve_gaussian,
    eof_saturation,
    eof_time_curve,
    fock,
    gaussian_charfunc,
    make_coherent,
    matrix_cosh_sinh,
    one_mode_alpha_beta,
    ppt_min_symplectic,
    propagate_mn_equal_damping,
    propagate_mn_real_eta,
    purity_general,
    real_eta_closed_form_two_mode,
    simon_separability,
    solve_alpha_beta,
    two_mode_pauli_closed_form,
    ultimate_purity,
    vacuum,
)
from optevo.charfunc import chi_grid
from optevo.states import RealCM

import oracles

GRID = chi_grid(s=1)  # 25 points, |Re mu|, |Im mu| <= 2


def report(name: str, ok: bool) -> bool:
    print(f"[acceptance] {name}: {'PASS' if ok else 'FAIL'}")
    return ok


# ---------------------------------------------------------------- 1: supremum


def test_eof_supremum():
    value = eof_saturation(SystemParams.two_mode_drive(0.5, 1.0, 0.0)).value
    assert report("eof-supremum 0.5662", abs(value - 0.5662) <= 1e-4)


# ---------------------------------------------------------------- 2: threshold map


def test_eof_map_threshold_boundary():
    ratios = np.linspace(0.0, 1.0, 50)
    noises = np.linspace(0.0, 1.0, 50)
    ok = True
    for ratio in ratios:
        for nbar0 in noises:
            value = eof_saturation(SystemParams.two_mode_drive(ratio, 1.0, nbar0)).value
            ok = ok and ((value > 0.0) == (ratio > nbar0))
    assert report("eof-map boundary eta1/Gamma > nbar0", ok)


# ---------------------------------------------------------------- 3: transient curves


TIMES = np.linspace(0.0, 10.0, 41)
RATIOS = np.round(np.arange(0.1, 1.01, 0.1), 10)


def _curves(nbar0):
    # dt only matters at the eta1 = Gamma/2 numeric fallback; 0.01 leaves
    # RK4 error orders below the 1e-3 acceptance tolerance
    out = {}
    for ratio in RATIOS:
        p = SystemParams.two_mode_drive(float(ratio), 1.0, nbar0)
        out[float(ratio)] = np.array(
            [r.value for r in eof_time_curve(p, vacuum(2), TIMES, dt=0.01)]
        )
    return out


@pytest.mark.parametrize("nbar0", [0.4, 0.6])
def test_eof_transient_curves(nbar0):
    curves = _curves(nbar0)
    zero_ok = True
    mono_ok = True
    sat_ok = True
    for ratio, values in curves.items():
        all_zero = values.max() == 0.0
        zero_ok = zero_ok and (all_zero == (ratio <= nbar0 + 1e-12))
        p = SystemParams.two_mode_drive(ratio, 1.0, nbar0)
        tail = eof_time_curve(p, vacuum(2), [10.0], dt=0.01)[0].value
        sat_ok = sat_ok and abs(tail - eof_saturation(p).value) <= 1e-3
    stacked = np.array([curves[r] for r in sorted(curves)])
    mono_ok = bool((np.diff(stacked, axis=0) >= -1e-12).all())
    assert report(f"eof-curves nbar0={nbar0} zero region (eta1/Gamma <= nbar0)", zero_ok)
    assert report(f"eof-curves nbar0={nbar0} monotone in drive", mono_ok)
    assert report(f"eof-curves nbar0={nbar0} saturation at Gamma t = 10", sat_ok)


@pytest.mark.xfail(
    strict=True,
    reason=(
        "the literal vacuum-input bound max(nbar0 Gamma, Gamma/2) misses that "
        "nbar0 Gamma < eta1 <= Gamma/2 entangles for nbar0 < 1/2 (settled regime); "
        "contradicts the threshold-map check, see the module docstring"
    ),
)
def test_eof_transient_literal_overamplified_bound():
    nbar0 = 0.4
    ok = True
    for ratio in (0.45, 0.5):
        p = SystemParams.two_mode_drive(ratio, 1.0, nbar0)
        values = [r.value for r in eof_time_curve(p, vacuum(2), TIMES, dt=0.01)]
        ok = ok and max(values) == 0.0  # ratio <= max(nbar0, 1/2): literally zero
    assert ok


# ---------------------------------------------------------------- 4 and 5: one-mode oracle


@pytest.fixture(scope="module")
def one_mode_oracle_runs():
    p = SystemParams.one_mode(eta=0.3, Gamma=1.0, nbar=0.2)
    initial = make_coherent(0.5)
    rho = fock.gaussian_to_fock(initial, 30)
    runs = {}
    prev_t = 0.0
    for t in (0.5, 1.0, 2.0):
        rho = fock.integrate(rho, p, t - prev_t, 1e-3)
        runs[t] = rho
        prev_t = t
    return p, initial, runs


def test_oracle_chi_equivalence_general(one_mode_oracle_runs):
    p, initial, runs = one_mode_oracle_runs
    worst = 0.0
    for t, rho_t in runs.items():
        ana = eval_gaussian_chi(evolve_gaussian(initial, p, t), GRID)
        num = fock.chi_grid_from_rho(rho_t, GRID)
        worst = max(worst, float(np.abs(ana - num).max()))
    assert report(f"oracle chi general case (max err {worst:.2e})", worst <= 1e-4)


def test_oracle_purity_equivalence(one_mode_oracle_runs):
    p, initial, runs = one_mode_oracle_runs
    worst = 0.0
    for t, rho_t in runs.items():
        closed = purity_general(evolve_gaussian(initial, p, t))
        worst = max(worst, abs(closed - fock.purity_from_rho(rho_t)))
    ok_traj = worst <= 1e-4
    p_ss = SystemParams.one_mode(eta=0.25, Gamma=1.0)
    settled = purity_general(evolve_gaussian(vacuum(1), p_ss, 20.0))
    ok_ultimate = (
        abs(settled - np.sqrt(3) / 2) <= 1e-4
        and abs(ultimate_purity(p_ss) - np.sqrt(3) / 2) <= 1e-4
    )
    assert report(f"oracle purity (max err {worst:.2e})", ok_traj)
    assert report("ultimate purity sqrt(3)/2 at Gamma t = 20", ok_ultimate)


# ---------------------------------------------------------------- 6: phase damping


def test_phase_damping_against_exact_dephasing():
    gamma = 0.5
    chi0 = gaussian_charfunc(make_coherent(1.0))
    p = SystemParams.one_mode(gamma_phase=gamma)
    rho0 = fock.gaussian_to_fock(make_coherent(1.0), 30)
    worst = 0.0
    for gt in (0.25, 0.5, 1.0):
        t = gt / gamma
        quad = evolve_chi_phase_damping(chi0, p, t)(GRID)
        exact_rho = oracles.dephased_coherent_rho(1.0, gamma, t, 30)
        exact = fock.chi_grid_from_rho(fock.FockDensity(rho=exact_rho, cutoff=30, s=1), GRID)
        rk4 = fock.chi_grid_from_rho(fock.integrate(rho0, p, t, 2e-3), GRID)
        worst = max(
            worst,
            float(np.abs(quad - exact).max()),
            float(np.abs(quad - rk4).max()),
        )
    assert report(f"phase damping quadrature vs exact and RK4 (max err {worst:.2e})", worst <= 1e-5)


# ---------------------------------------------------------------- 7: residuals


def test_propagator_and_coefficient_residuals():
    mn_cases = [
        (SystemParams.one_mode(eta=0.3, Gamma=1.0, nbar=0.1), propagate_mn_equal_damping),
        (SystemParams.two_mode_drive(0.4 - 0.15j, 0.9), propagate_mn_equal_damping),
        (
            SystemParams(
                eta=np.array([[0.1, 0.3], [0.3, -0.2]]),
                gamma_amp=[1.0, 0.4],
                nbar=[0, 0],
                w=[0, 0],
                gamma_phase=[0, 0],
            ),
            propagate_mn_real_eta,
        ),
        (
            SystemParams(
                eta=np.array([[0.1, 0.3], [0.3, -0.2]]),
                gamma_amp=[1.0, 0.4],
                nbar=[0, 0],
                w=[0, 0],
                gamma_phase=[0, 0],
            ),
            real_eta_closed_form_two_mode,
        ),
    ]
    worst_mn = 0.0
    for p, maker in mn_cases:
        for t in (0.3, 1.0, 2.0):
            worst_mn = max(worst_mn, *oracles.mn_residuals(p, maker, t))
    ok_mn = worst_mn <= 1e-6

    ab_cases = [
        SystemParams.one_mode(eta=0.25, Gamma=1.0),
        SystemParams.one_mode(eta=0.2 + 0.1j, Gamma=1.3, nbar=0.4, w=0.3j),
        SystemParams.two_mode_drive(0.4, 1.0, 0.2),
        SystemParams.two_mode_drive(0.3 - 0.2j, 1.1, 0.3, w=(0.2, 0.1j)),
    ]
    worst_ab = 0.0
    for p in ab_cases:
        worst_ab = max(worst_ab, oracles.ab_residual(p, solve_alpha_beta(p)))
        if p.s == 1:
            worst_ab = max(worst_ab, oracles.ab_residual(p, one_mode_alpha_beta(p)))
    ok_ab = worst_ab <= 1e-10

    rng = np.random.default_rng(31)
    worst_pauli = 0.0
    for _ in range(20):
        eta = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        eta = 0.4 * (eta + eta.T) / 2
        t = rng.uniform(0.2, 1.5)
        C1, S1 = matrix_cosh_sinh(eta * t)
        C2, S2 = two_mode_pauli_closed_form(eta, t)
        worst_pauli = max(worst_pauli, float(np.abs(C1 - C2).max()), float(np.abs(S1 - S2).max()))
    ok_pauli = worst_pauli <= 1e-10

    assert report(f"propagator residuals (max {worst_mn:.2e})", ok_mn)
    assert report(f"steady coefficient residuals (max {worst_ab:.2e})", ok_ab)
    assert report(f"pauli closed forms vs series (max {worst_pauli:.2e})", ok_pauli)


# ---------------------------------------------------------------- 8: limit web


def test_limit_web():
    chi0 = gaussian_charfunc(make_coherent(0.4 - 0.2j))
    t = 0.9
    p_damp = SystemParams.one_mode(Gamma=1.0, nbar=0.2, w=0.25)
    d1 = evolve_chi_general(chi0, p_damp, t)(GRID)
    d2 = evolve_chi_amplitude_damping(chi0, p_damp, t)(GRID)
    err = float(np.abs(d1 - d2).max())
    p_amp = SystemParams.one_mode(eta=0.3 + 0.1j)
    a1 = evolve_chi_general(chi0, p_amp, t)(GRID)
    a2 = evolve_chi_amplification(chi0, p_amp, t)(GRID)
    err = max(err, float(np.abs(a1 - a2).max()))
    p_ad = SystemParams.one_mode(Gamma=0.6, nbar=0.15)
    m1 = evolve_chi_amp_phase(chi0, p_ad, t)(GRID)
    m2 = evolve_chi_amplitude_damping(chi0, p_ad, t)(GRID)
    err = max(err, float(np.abs(m1 - m2).max()))
    p_ph = SystemParams.one_mode(gamma_phase=0.4)
    f1 = evolve_chi_amp_phase(chi0, p_ph, t)(GRID)
    f2 = evolve_chi_phase_damping(chi0, p_ph, t)(GRID)
    err = max(err, float(np.abs(f1 - f2).max()))
    assert report(f"limit web (max err {err:.2e})", err <= 1e-12)


# ---------------------------------------------------------------- 9: two-mode oracle


def test_two_mode_oracle_spot_check():
    p = SystemParams.two_mode_drive(0.4, 1.0, 0.2)
    rho_t = fock.integrate(fock.gaussian_to_fock(vacuum(2), 14), p, 1.0, 2e-3)
    state_t = evolve_gaussian(vacuum(2), p, 1.0)
    a1, a2 = fock.mode_operators(2, 14)
    ops = (a1, a2)
    A_num = np.zeros((2, 2), dtype=complex)
    B_num = np.zeros((2, 2), dtype=complex)
    for j in range(2):
        for k in range(2):
            A_num[j, k] = np.trace(rho_t.rho @ ops[j].conj().T @ ops[k]) + (0.5 if j == k else 0.0)
            B_num[j, k] = np.trace(rho_t.rho @ ops[j] @ ops[k])
    A_ana, B_ana = state_t.blocks
    err = float(max(np.abs(A_num - A_ana).max(), np.abs(B_num - B_ana).max()))
    ok = err <= 1e-3 and rho_t.trace_loss <= 1e-3
    assert report(f"two-mode oracle second moments (max err {err:.2e})", ok)


# ---------------------------------------------------------------- 10: criterion cross-check


def test_simon_vs_ppt_cross_validation():
    rng = np.random.default_rng(99)
    disagreements = 0
    for _ in range(100):
        mat = oracles.random_physical_two_mode_cm(rng, noise=rng.uniform(0.05, 0.5))
        rcm = RealCM(mat=mat)
        rep = simon_separability(rcm)
        ppt_sep = ppt_min_symplectic(rcm) >= 0.5
        if rep.separable != ppt_sep and abs(rep.margin) > 1e-10:
            disagreements += 1
    assert report("simon vs partial-transpose eigenvalues (100 states)", disagreements == 0)
