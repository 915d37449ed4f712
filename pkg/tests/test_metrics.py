import numpy as np
import pytest

from optevo import (
    OverAmplificationError,
    RealCM,
    SystemParams,
    UnphysicalStateError,
    complex_to_real_cm,
    entanglement_threshold,
    eof_saturation,
    eof_symmetric,
    eof_time_curve,
    evolve_gaussian,
    gaussian_charfunc,
    make_coherent,
    make_squeezed,
    make_thermal,
    make_two_mode_squeezed_thermal,
    overamplified_vacuum_inseparable,
    ppt_min_symplectic,
    purity_general,
    purity_one_mode,
    purity_squeezed_thermal_t,
    simon_separability,
    standard_form,
    steady_state,
    steady_state_inseparable,
    ultimate_purity,
    ultimate_purity_max,
    vacuum,
)
from optevo import fock
from optevo.states import GaussianState

import oracles


# ---------------------------------------------------------------- purity


def test_purity_one_mode_examples():
    assert purity_one_mode(vacuum(1)) == pytest.approx(1.0)
    assert purity_one_mode(make_thermal(1.0)) == pytest.approx(oracles.thermal_purity_series(1.0), abs=1e-12)
    assert purity_one_mode(make_squeezed(0.7)) == pytest.approx(1.0, abs=1e-12)


def test_purity_one_mode_rejects_bad_cm():
    bad = GaussianState(m=np.zeros(1), cm=np.array([[0.1, 0.4], [0.4, 0.1]], dtype=complex))
    with pytest.raises(UnphysicalStateError):
        purity_one_mode(bad)


def test_purity_general_examples():
    assert purity_general(vacuum(2)) == pytest.approx(1.0, abs=1e-12)
    product = GaussianState(m=np.zeros(2), cm=1.5 * np.eye(4, dtype=complex))
    assert purity_general(product) == pytest.approx(1.0 / 9.0, abs=1e-12)


def test_purity_general_equals_one_mode():
    for st in (make_thermal(0.6), make_squeezed(0.5, 0.3), make_coherent(0.2)):
        assert purity_general(st) == pytest.approx(purity_one_mode(st), abs=1e-14)


def test_purity_against_quadrature_and_fock():
    # evolved mixed state, checked against |chi|^2 integration and Tr rho^2
    p = SystemParams.one_mode(eta=0.2, Gamma=1.0, nbar=0.3)
    st = evolve_gaussian(make_coherent(0.4), p, 0.7)
    value = purity_general(st)
    quad = oracles.purity_by_quadrature(gaussian_charfunc(st))
    assert abs(value - quad) < 1e-6
    rho = fock.integrate(fock.gaussian_to_fock(make_coherent(0.4), 30), p, 0.7, 1e-3)
    assert abs(value - fock.purity_from_rho(rho)) < 1e-6


def test_purity_two_mode_against_fock():
    st = make_two_mode_squeezed_thermal(0.2, 0.4)
    rho = fock.gaussian_to_fock(st, 14)
    assert abs(purity_general(st) - fock.purity_from_rho(rho)) < 1e-6


def test_purity_range_and_pure_condition():
    rng = np.random.default_rng(2)
    for _ in range(20):
        mat = oracles.random_physical_two_mode_cm(rng)
        from optevo.states import real_to_complex_cm

        st = GaussianState(m=np.zeros(2), cm=real_to_complex_cm(mat))
        val = purity_general(st)
        assert 0.0 < val <= 1.0 + 1e-12
        det = np.linalg.det(mat)
        if abs(det - 1 / 16) < 1e-12:
            assert val == pytest.approx(1.0, abs=1e-10)


# ---------------------------------------------------------------- settled purity


def test_ultimate_purity_thermal_limit():
    assert ultimate_purity(SystemParams.one_mode(Gamma=1.0, nbar=0.7)) == pytest.approx(1.0 / 2.4)


def test_ultimate_purity_example_value():
    p = SystemParams.one_mode(eta=0.25, Gamma=1.0)
    assert ultimate_purity(p) == pytest.approx(np.sqrt(3) / 2, abs=1e-12)
    assert ultimate_purity(p) == pytest.approx(purity_one_mode(steady_state(p)), abs=1e-12)


def test_ultimate_purity_matches_steady_state_with_squeezed_bath():
    p = SystemParams.one_mode(eta=0.25 * np.exp(0.4j), Gamma=1.0, nbar=0.3, w=0.2 * np.exp(0.9j))
    assert ultimate_purity(p) == pytest.approx(purity_one_mode(steady_state(p)), abs=1e-12)


def test_ultimate_purity_phase_matched_equals_max():
    p = SystemParams.one_mode(eta=0.25 * np.exp(0.4j), Gamma=1.0, nbar=0.3, w=0.2 * np.exp(0.4j))
    assert ultimate_purity(p) == pytest.approx(ultimate_purity_max(p), abs=1e-12)
    assert ultimate_purity(p) == pytest.approx(purity_one_mode(steady_state(p)), abs=1e-12)
    # any other bath phase does worse
    worse = SystemParams.one_mode(eta=0.25 * np.exp(0.4j), Gamma=1.0, nbar=0.3, w=0.2 * np.exp(1.4j))
    assert ultimate_purity(worse) < ultimate_purity(p)


def test_ultimate_purity_monotone_decreasing_in_drive():
    values = [
        ultimate_purity(SystemParams.one_mode(eta=e, Gamma=1.0, nbar=0.2))
        for e in np.linspace(0.0, 0.45, 12)
    ]
    assert all(a >= b - 1e-14 for a, b in zip(values, values[1:]))


def test_ultimate_purity_rejects_over_amplification():
    with pytest.raises(OverAmplificationError):
        ultimate_purity(SystemParams.one_mode(eta=0.6, Gamma=1.0))


def test_squeezed_thermal_purity_examples():
    assert purity_squeezed_thermal_t(0.0, 0.0, 0.0, 0.5, 0.4, 0.0) == pytest.approx(1.0, abs=1e-12)
    # internal consistency with the evolution pipeline
    N, r, nb, e, G, t = 0.2, 0.0, 0.1, 0.5, 0.4, 1.0
    p = SystemParams.one_mode(eta=e, Gamma=G, nbar=nb)
    closed = purity_squeezed_thermal_t(N, r, nb, e, G, t)
    assert closed == pytest.approx(purity_one_mode(evolve_gaussian(make_thermal(N), p, t)), abs=1e-10)
    # squeezed input variant
    closed_sq = purity_squeezed_thermal_t(0.0, 0.3, nb, e, G, t)
    assert closed_sq == pytest.approx(
        purity_one_mode(evolve_gaussian(make_squeezed(0.3), p, t)), abs=1e-10
    )


def test_squeezed_thermal_purity_large_t_asymptote():
    N, nb, e, G = 0.2, 0.1, 0.5, 0.4
    t = 8.0 / (e - G / 2)
    root = np.sqrt(4 * e * e - G * G)
    nprime = (nb + 0.5) * G / root
    emr0 = (2 * e - G) / root
    target = 0.5 / np.sqrt(nprime**2 + nprime * (N + 0.5) * emr0)
    ratio = purity_squeezed_thermal_t(N, 0.0, nb, e, G, t) * np.exp((e - G / 2) * t)
    assert ratio == pytest.approx(target, rel=0.01)


def test_squeezed_thermal_purity_domain_checks():
    with pytest.raises(ValueError):
        purity_squeezed_thermal_t(0.0, 0.0, 0.0, 0.2, 0.5, 1.0)  # Gamma >= 2 eta
    with pytest.raises(ValueError):
        purity_squeezed_thermal_t(-0.1, 0.0, 0.0, 0.5, 0.4, 1.0)


# ---------------------------------------------------------------- separability


def test_vacuum_sits_on_separability_boundary():
    rep = simon_separability(complex_to_real_cm(vacuum(2)))
    assert rep.separable
    assert rep.margin == pytest.approx(0.0, abs=1e-14)


def test_two_mode_squeezed_is_inseparable():
    rcm = complex_to_real_cm(make_two_mode_squeezed_thermal(0.0, 0.5))
    rep = simon_separability(rcm)
    assert not rep.separable
    assert ppt_min_symplectic(rcm) == pytest.approx(np.exp(-1.0) / 2, abs=1e-12)


def test_unsqueezed_thermal_product_is_separable():
    rcm = complex_to_real_cm(make_two_mode_squeezed_thermal(0.3, 0.0))
    rep = simon_separability(rcm)
    assert rep.separable
    assert ppt_min_symplectic(rcm) >= 0.5


def test_weak_drive_steady_state_is_separable():
    p = SystemParams.two_mode_drive(0.3, 1.0, 0.4)
    rep = simon_separability(complex_to_real_cm(steady_state(p)))
    assert rep.separable


def test_strong_drive_steady_state_is_inseparable():
    p = SystemParams.two_mode_drive(0.45, 1.0, 0.4)
    rep = simon_separability(complex_to_real_cm(steady_state(p)))
    assert not rep.separable


def test_simon_agrees_with_ppt_on_random_states(count=100):
    rng = np.random.default_rng(99)
    disagreements = 0
    for _ in range(count):
        mat = oracles.random_physical_two_mode_cm(rng, noise=rng.uniform(0.05, 0.5))
        rcm = RealCM(mat=mat)
        rep = simon_separability(rcm)
        ppt_sep = ppt_min_symplectic(rcm) >= 0.5
        if rep.separable != ppt_sep and abs(rep.margin) > 1e-10:
            disagreements += 1
    assert disagreements == 0


def test_separability_requires_two_modes():
    with pytest.raises(ValueError):
        simon_separability(complex_to_real_cm(vacuum(1)))


# ---------------------------------------------------------------- standard form


def test_standard_form_of_steady_state():
    e1, G, nb = 0.3, 1.0, 0.2
    p = SystemParams.two_mode_drive(e1, G, nb)
    sf = standard_form(complex_to_real_cm(steady_state(p))).mat
    k = G * (nb + 0.5) / (G * G - 4 * e1 * e1)
    expected = k * (
        G * np.eye(4) + 2 * e1 * np.kron([[0, 1], [1, 0]], [[1, 0], [0, -1]])
    )
    # c+ = -c- makes the invariant quadratic degenerate; sqrt(eps)-level noise
    assert np.abs(sf - expected).max() < 2e-8


def test_standard_form_idempotent():
    mat = np.diag([0.9, 0.9, 1.1, 1.1])
    mat[0, 2] = mat[2, 0] = 0.35
    mat[1, 3] = mat[3, 1] = -0.2
    out = standard_form(RealCM(mat=mat)).mat
    assert np.abs(out - mat).max() < 1e-12


def test_standard_form_preserves_invariants():
    rng = np.random.default_rng(17)
    for _ in range(20):
        mat = oracles.random_physical_two_mode_cm(rng)
        rcm = RealCM(mat=mat)
        sf = standard_form(rcm)
        for block in ("gamma_a", "gamma_b", "gamma_c"):
            assert np.linalg.det(getattr(sf, block)) == pytest.approx(
                np.linalg.det(getattr(rcm, block)), abs=1e-10, rel=1e-8
            )
        assert np.linalg.det(sf.mat) == pytest.approx(np.linalg.det(mat), abs=1e-10, rel=1e-8)


def test_standard_form_zero_correlation_block():
    mat = np.diag([0.8, 0.8, 1.3, 1.3])
    out = standard_form(RealCM(mat=mat)).mat
    assert np.abs(out - mat).max() < 1e-12


# ---------------------------------------------------------------- entanglement of formation


def test_eof_boundary_and_reference_values():
    assert eof_symmetric(1.0).value == 0.0
    assert eof_symmetric(1.7).value == 0.0
    assert eof_symmetric(0.5).value == pytest.approx(0.5662, abs=1e-4)
    assert eof_symmetric(5.0 / 9.0).value == pytest.approx(0.4442, abs=1e-4)
    with pytest.raises(ValueError):
        eof_symmetric(0.0)


def test_eof_time_curve_initial_two_mode_squeezed():
    p = SystemParams.two_mode_drive(0.8, 1.0, 0.0)
    st = make_two_mode_squeezed_thermal(0.0, 0.5)
    res = eof_time_curve(p, st, [0.0])[0]
    assert res.z == pytest.approx(np.exp(-1.0), abs=1e-12)
    assert res.value == pytest.approx(eof_symmetric(np.exp(-1.0)).value, abs=1e-12)
    # entropy of entanglement of the pure two-mode squeezed state
    assert res.value == pytest.approx(
        (np.sinh(0.5) ** 2 + 1) * np.log2(np.sinh(0.5) ** 2 + 1)
        - np.sinh(0.5) ** 2 * np.log2(np.sinh(0.5) ** 2),
        abs=1e-12,
    )


def test_eof_time_curve_approaches_saturation():
    for e1, nb in ((0.8, 0.0), (0.7, 0.6), (0.45, 0.4)):
        p = SystemParams.two_mode_drive(e1, 1.0, nb)
        tail = eof_time_curve(p, vacuum(2), [20.0])[0]
        assert tail.value == pytest.approx(eof_saturation(p).value, abs=1e-6)


def test_eof_time_curve_zero_below_threshold():
    p = SystemParams.two_mode_drive(0.3, 1.0, 0.4)
    values = [r.value for r in eof_time_curve(p, vacuum(2), np.linspace(0, 12, 40))]
    assert max(values) == 0.0


def test_eof_time_curve_matches_evolution_pipeline():
    p = SystemParams.two_mode_drive(0.8, 1.0, 0.2)
    st = make_two_mode_squeezed_thermal(0.1, 0.3)
    times = [0.4, 1.1]
    curve = eof_time_curve(p, st, times)
    for t, res in zip(times, curve):
        evolved = evolve_gaussian(st, p, t)
        rcm = complex_to_real_cm(evolved).mat
        assert res.z == pytest.approx(2 * (rcm[0, 0] - rcm[0, 2]), abs=1e-10)


def test_eof_time_curve_degenerate_drive_uses_numeric_path():
    p = SystemParams.two_mode_drive(0.5, 1.0, 0.2)
    res = eof_time_curve(p, vacuum(2), [1.5])[0]
    fine = eof_time_curve(p, vacuum(2), [1.5], dt=5e-4)[0]
    assert res.z == pytest.approx(fine.z, abs=1e-8)
    assert res.value > 0  # 0.5 > nbar0 = 0.2 entangles even at the degeneracy


def test_eof_time_curve_rejects_asymmetric_state():
    p = SystemParams.two_mode_drive(0.8, 1.0, 0.0)
    lopsided = GaussianState(m=np.zeros(2), cm=np.diag([0.6, 0.9, 0.6, 0.9]).astype(complex))
    with pytest.raises(ValueError):
        eof_time_curve(p, lopsided, [0.5])


def test_eof_saturation_values():
    assert eof_saturation(SystemParams.two_mode_drive(0.5, 1.0, 0.0)).value == pytest.approx(
        0.5662, abs=1e-4
    )
    assert eof_saturation(SystemParams.two_mode_drive(0.4, 1.0, 0.4)).value == 0.0
    assert eof_saturation(SystemParams.two_mode_drive(0.4, 1.0, 0.0)).value == pytest.approx(
        0.4442, abs=1e-4
    )
    assert eof_saturation(SystemParams.two_mode_drive(0.8, 1.0, 0.6)).value == pytest.approx(
        eof_symmetric(2.2 / 2.6).value, abs=1e-12
    )


def test_eof_saturation_monotone_in_drive():
    values = [
        eof_saturation(SystemParams.two_mode_drive(e, 1.0, 0.3)).value
        for e in np.linspace(0.0, 1.2, 25)
    ]
    assert all(b >= a - 1e-14 for a, b in zip(values, values[1:]))


def test_threshold_criteria():
    assert entanglement_threshold(SystemParams.two_mode_drive(0.7, 1.0, 0.6))
    assert not entanglement_threshold(SystemParams.two_mode_drive(0.45, 1.0, 0.5))
    assert not entanglement_threshold(SystemParams.two_mode_drive(0.0, 1.0, 0.0))
    # settled-regime window needs nbar0 < 1/2
    assert steady_state_inseparable(SystemParams.two_mode_drive(0.45, 1.0, 0.4))
    assert not steady_state_inseparable(SystemParams.two_mode_drive(0.55, 1.0, 0.4))
    assert not steady_state_inseparable(SystemParams.two_mode_drive(0.45, 1.0, 0.5))
    # over-amplified vacuum branch
    assert overamplified_vacuum_inseparable(SystemParams.two_mode_drive(0.7, 1.0, 0.6))
    assert not overamplified_vacuum_inseparable(SystemParams.two_mode_drive(0.45, 1.0, 0.4))


def test_steady_separability_matches_threshold():
    # below threshold the settled state is separable, above it is not
    for e1, nb in ((0.3, 0.4), (0.45, 0.4), (0.2, 0.1), (0.05, 0.0)):
        p = SystemParams.two_mode_drive(e1, 1.0, nb)
        rep = simon_separability(complex_to_real_cm(steady_state(p)))
        assert rep.separable == (not entanglement_threshold(p))
