"""Purity, separability and entanglement-of-formation analytics.

Everything operates on the covariance conventions of the states module:
complex blocks [[A, B*], [B, A*]] or the real quadrature form with vacuum
variance 1/2.  Two-mode separability uses the Simon determinant inequality on
the real blocks, cross-checked by partial-transpose symplectic eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OverAmplificationError, UnphysicalStateError
from .evolution import evolve_gaussian
from .states import (
    GaussianState,
    RealCM,
    SystemParams,
    complex_to_real_cm,
    real_to_complex_cm,
    split_cm,
)

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])  # i sigma_2
_S3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def purity_one_mode(state: GaussianState) -> float:
    """1 / (2 sqrt((Re g1)^2 - |g2|^2)) from gamma = [[g1, g2*], [g2, g1*]]."""
    if state.s != 1:
        raise ValueError("one-mode formula requires s = 1")
    g1 = state.cm[0, 0].real
    g2 = state.cm[1, 0]
    disc = g1 * g1 - abs(g2) ** 2
    if disc <= 0:
        raise UnphysicalStateError("covariance matrix has nonpositive purity discriminant")
    return float(1.0 / (2.0 * np.sqrt(disc)))


def purity_general(state: GaussianState) -> float:
    """Tr rho^2 of an s-mode Gaussian state: (2^s sqrt(det gamma_re))^-1."""
    det = float(np.linalg.det(complex_to_real_cm(state).mat))
    if det <= 0:
        raise UnphysicalStateError("real covariance matrix has nonpositive determinant")
    return float(1.0 / (2**state.s * np.sqrt(det)))


def _one_mode_scalars(p: SystemParams):
    if p.s != 1:
        raise ValueError("one-mode formula requires s = 1")
    return (
        complex(p.eta[0, 0]),
        float(p.gamma_amp[0]),
        float(p.nbar[0]),
        complex(p.w[0]),
    )


def ultimate_purity(p: SystemParams) -> float:
    """Settled purity of the one-mode damped amplifier (Gamma > 2|eta|):

    1/2 { [Gamma^2 (nbar + 1/2)^2 - |w|^2 (Gamma^2 - 2|eta|^2)
          - eta*^2 w^2 - eta^2 w*^2] / (Gamma^2 - 4|eta|^2) }^{-1/2}
    """
    eta, G, nb, w = _one_mode_scalars(p)
    D = G * G - 4 * abs(eta) ** 2
    if D <= 0:
        raise OverAmplificationError("settled purity requires Gamma > 2|eta|")
    inner = (
        G * G * (nb + 0.5) ** 2
        - abs(w) ** 2 * (G * G - 2 * abs(eta) ** 2)
        - 2.0 * (eta.conjugate() ** 2 * w * w).real
    ) / D
    return float(0.5 / np.sqrt(inner))


def ultimate_purity_max(p: SystemParams) -> float:
    """Settled purity when the drive phase matches the bath-squeezing phase,
    the maximum over that phase: 1/2 {Gamma^2 [(nbar + 1/2)^2 - |w|^2]
    / (Gamma^2 - 4|eta|^2)}^{-1/2}."""
    eta, G, nb, w = _one_mode_scalars(p)
    D = G * G - 4 * abs(eta) ** 2
    if D <= 0:
        raise OverAmplificationError("settled purity requires Gamma > 2|eta|")
    inner = G * G * ((nb + 0.5) ** 2 - abs(w) ** 2) / D
    return float(0.5 / np.sqrt(inner))


def purity_squeezed_thermal_t(
    N: float, r: float, nbar: float, eta: float, Gamma: float, t: float
) -> float:
    """Purity of an initially squeezed thermal state under real over-amplified
    drive (Gamma < 2 eta, w = 0, squeeze phase 0):

    mu_p(t) = 1/2 [ ( (N + 1/2) e^{2r} e^{(2 eta - Gamma) t}
                      + n' e^{r0} (e^{(2 eta - Gamma) t} - 1) )
                    ( (N + 1/2) e^{-2r} e^{-(2 eta + Gamma) t}
                      + n' e^{-r0} (1 - e^{-(2 eta + Gamma) t}) ) ]^{-1/2}

    with cosh r0 = 2 eta / sqrt(4 eta^2 - Gamma^2) and
    n' = (nbar + 1/2) sinh r0.  N = 0 is a squeezed input, r = 0 a thermal one.
    """
    if not (eta > 0 and np.isreal(eta)):
        raise ValueError("requires a real positive drive strength")
    if Gamma < 0 or Gamma >= 2 * eta:
        raise ValueError("requires 0 <= Gamma < 2 eta")
    if N < 0:
        raise ValueError("mean photon number must be >= 0")
    root = np.sqrt(4 * eta * eta - Gamma * Gamma)
    er0 = (2 * eta + Gamma) / root
    emr0 = (2 * eta - Gamma) / root
    nprime = (nbar + 0.5) * Gamma / root
    grow = np.exp((2 * eta - Gamma) * t)
    shrink = np.exp(-(2 * eta + Gamma) * t)
    first = (N + 0.5) * np.exp(2 * r) * grow + nprime * er0 * (grow - 1.0)
    second = (N + 0.5) * np.exp(-2 * r) * shrink + nprime * emr0 * (1.0 - shrink)
    return float(0.5 / np.sqrt(first * second))


@dataclass(frozen=True, eq=False)
class SeparabilityReport:
    separable: bool
    margin: float
    standard_form: RealCM


@dataclass(frozen=True, eq=False)
class EofResult:
    z: float
    delta: float
    value: float


def _simon_margin_real(ga: np.ndarray, gb: np.ndarray, gc: np.ndarray) -> float:
    det_a = float(np.linalg.det(ga))
    det_b = float(np.linalg.det(gb))
    det_c = float(np.linalg.det(gc))
    cross = float(np.trace(ga @ _J @ gc @ _J @ gb @ _J @ gc.T @ _J).real)
    lhs = det_a * det_b + (0.25 - abs(det_c)) ** 2 - cross
    rhs = 0.25 * (det_a + det_b)
    return lhs - rhs


def _simon_margin_complex(cm: np.ndarray) -> float:
    # Same inequality written on the per-pair complex 2x2 cells
    # [[alpha_i, beta_i*], [beta_i, alpha_i*]] with sigma_3 in place of J.
    A, B = split_cm(cm)
    cells = {}
    for name, (j, k) in (("a", (0, 0)), ("b", (1, 1)), ("c", (0, 1))):
        cells[name] = np.array(
            [[A[j, k], B[j, k].conjugate()], [B[j, k], A[j, k].conjugate()]], dtype=complex
        )
    ga, gb, gc = cells["a"], cells["b"], cells["c"]
    det_a = float(np.linalg.det(ga).real)
    det_b = float(np.linalg.det(gb).real)
    det_c = float(np.linalg.det(gc).real)
    cross = float(np.trace(ga @ _S3 @ gc @ _S3 @ gb @ _S3 @ gc.conj().T @ _S3).real)
    lhs = det_a * det_b + (0.25 - abs(det_c)) ** 2 - cross
    rhs = 0.25 * (det_a + det_b)
    return lhs - rhs


def simon_separability(rcm: RealCM) -> SeparabilityReport:
    """Simon's determinant test for a two-mode real covariance matrix.

    margin >= 0 means the partial transpose stays physical (separable for two
    modes).  The inequality is evaluated twice, on the real blocks and on the
    complex cells, and the two codings must agree.
    """
    if rcm.s != 2:
        raise ValueError("separability test is for two-mode states")
    margin = _simon_margin_real(rcm.gamma_a, rcm.gamma_b, rcm.gamma_c)
    margin_cx = _simon_margin_complex(real_to_complex_cm(rcm))
    scale = max(abs(margin), abs(margin_cx), 1.0)
    if abs(margin - margin_cx) > 1e-8 * scale:
        raise RuntimeError(
            f"inconsistent separability codings: {margin:.3e} vs {margin_cx:.3e}"
        )
    return SeparabilityReport(
        separable=bool(margin >= 0.0), margin=float(margin), standard_form=standard_form(rcm)
    )


def ppt_min_symplectic(rcm: RealCM) -> float:
    """Smallest symplectic eigenvalue of the partially transposed covariance
    matrix; values below 1/2 certify entanglement.  Independent of the Simon
    determinant coding."""
    if rcm.s != 2:
        raise ValueError("partial-transpose test is for two-mode states")
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    tilde = flip @ rcm.mat @ flip
    omega = np.zeros((4, 4))
    omega[:2, :2] = _J
    omega[2:, 2:] = _J
    eig = np.linalg.eigvals(1j * omega @ tilde)
    return float(np.sort(np.abs(eig))[0])


def standard_form(rcm: RealCM) -> RealCM:
    """Local-symplectic normal form diag-blocks (a s0, b s0, diag(c+, c-)).

    Constructed from the four local invariants det gamma_a, det gamma_b,
    det gamma_c and det gamma; the result preserves all four.
    """
    if rcm.s != 2:
        raise ValueError("standard form is for two-mode states")
    det_a = float(np.linalg.det(rcm.gamma_a))
    det_b = float(np.linalg.det(rcm.gamma_b))
    det_c = float(np.linalg.det(rcm.gamma_c))
    det_g = float(np.linalg.det(rcm.mat))
    if det_a <= 0 or det_b <= 0:
        raise UnphysicalStateError("local blocks must have positive determinant")
    a = np.sqrt(det_a)
    b = np.sqrt(det_b)
    ab = a * b
    total = (ab * ab + det_c * det_c - det_g) / ab
    disc = max(total * total - 4.0 * det_c * det_c, 0.0)
    u = 0.5 * (total + np.sqrt(disc))
    # product form keeps c+ c- = det gamma_c exact despite cancellation in disc
    v = det_c * det_c / u if u > 0 else 0.0
    c_plus = np.sqrt(max(u, 0.0))
    c_minus = np.sign(det_c) * np.sqrt(max(v, 0.0))
    mat = np.diag([a, a, b, b])
    mat[0, 2] = mat[2, 0] = c_plus
    mat[1, 3] = mat[3, 1] = c_minus
    return RealCM(mat=mat)


def _entropy_g(x: float) -> float:
    """Bosonic entropy g(x) = (x+1) log2(x+1) - x log2 x, with g(0) = 0."""
    if x <= 0:
        return 0.0
    return float((x + 1) * np.log2(x + 1) - x * np.log2(x))


def eof_symmetric(z: float) -> EofResult:
    """Entanglement of formation of a symmetric two-mode Gaussian state from
    z = twice the smaller partial-transpose symplectic eigenvalue:

    E_f = g(Delta(z)),  Delta(z) = (z + 1/z - 2)/4,  zero for z >= 1.
    """
    if z <= 0:
        raise ValueError("z must be positive")
    delta = (z + 1.0 / z - 2.0) / 4.0
    value = 0.0 if z >= 1.0 else _entropy_g(delta)
    return EofResult(z=float(z), delta=float(delta), value=float(value))


def _symmetric_drive_scalars(p: SystemParams) -> tuple[float, float, float]:
    """(eta1, Gamma, nbar0) for a symmetric two-mode cross-drive configuration."""
    if p.s != 2:
        raise ValueError("requires two modes")
    if max(abs(p.eta[0, 0]), abs(p.eta[1, 1])) > 1e-12:
        raise ValueError("requires pure cross-mode drive (zero diagonal eta)")
    eta1 = p.eta[0, 1]
    if abs(eta1.imag) > 1e-12 * max(abs(eta1), 1.0):
        raise ValueError("requires a real cross-mode drive strength")
    g = p.gamma_amp
    if abs(g[0] - g[1]) > 1e-12 * max(g.max(), 1.0):
        raise ValueError("requires equal damping on both modes")
    if abs(p.nbar[0] - p.nbar[1]) > 1e-12:
        raise ValueError("requires equal bath occupations")
    if np.abs(p.w).max() > 0:
        raise ValueError("requires thermal (unsqueezed) baths")
    return float(abs(eta1.real)), float(g[0]), float(p.nbar[0])


def _symmetric_state_scalars(state: GaussianState) -> tuple[float, float]:
    """(G0, G1) with complex blocks A = G0 I and B = G1 sigma_1, both real."""
    A, B = state.blocks
    scale = max(np.abs(state.cm).max(), 1.0)
    ok = (
        abs(A[0, 0] - A[1, 1]) <= 1e-9 * scale
        and abs(A[0, 1]) <= 1e-9 * scale
        and abs(A[0, 0].imag) <= 1e-9 * scale
        and abs(B[0, 0]) <= 1e-9 * scale
        and abs(B[1, 1]) <= 1e-9 * scale
        and abs(B[0, 1].imag) <= 1e-9 * scale
        and np.abs(state.m).max() <= 1e-9
    )
    if not ok:
        raise ValueError(
            "entanglement-of-formation curve requires a symmetric two-mode state "
            "(A = a I, B = b sigma_1, zero moments)"
        )
    return float(A[0, 0].real), float(B[0, 1].real)


def eof_time_curve(
    p: SystemParams, initial: GaussianState, times, *, dt: float = 1e-3
) -> list[EofResult]:
    """E_f(t) for a symmetric two-mode state under cross-mode drive.

    Closed form: with G0, G1 the initial symmetric covariance scalars and
    (alpha_a, beta_c) the steady coefficients,

        c1(t) = e^{-Gamma t}[(G0 - alpha_a) cosh 2 eta1 t
                              + (G1 - beta_c) sinh 2 eta1 t] + alpha_a
        c2(t) = e^{-Gamma t}[(G0 - alpha_a) sinh 2 eta1 t
                              + (G1 - beta_c) cosh 2 eta1 t] + beta_c

    and E_f = g(Delta(z)) with z = 2 (c1 - c2), clamped to zero where the
    state is separable (z >= 1).  At the eta1 = Gamma/2 degeneracy the curve
    falls back to numeric covariance integration.
    """
    if p.gamma_phase.max() > 0:
        raise ValueError("phase damping is outside the Gaussian entanglement curve")
    eta1, Gamma, nbar0 = _symmetric_drive_scalars(p)
    G0, G1 = _symmetric_state_scalars(initial)
    D = Gamma * Gamma - 4 * eta1 * eta1
    out = []
    if abs(D) > 1e-10 * max(Gamma * Gamma, 1.0):
        alpha_a = Gamma * Gamma * (nbar0 + 0.5) / D
        beta_c = 2 * eta1 * Gamma * (nbar0 + 0.5) / D
        for t in times:
            ch = np.cosh(2 * eta1 * t)
            sh = np.sinh(2 * eta1 * t)
            fade = np.exp(-Gamma * t)
            c1 = fade * ((G0 - alpha_a) * ch + (G1 - beta_c) * sh) + alpha_a
            c2 = fade * ((G0 - alpha_a) * sh + (G1 - beta_c) * ch) + beta_c
            out.append(eof_symmetric(2.0 * (c1 - c2)))
        return out
    # degenerate drive: step the covariance numerically, reusing the semigroup
    # property to integrate each interval once
    order = np.argsort(np.asarray(times, dtype=float))
    results: dict[int, EofResult] = {}
    state = initial
    prev = 0.0
    for k in order:
        t = float(times[k])
        state = evolve_gaussian(state, p, t - prev, allow_numeric=True, dt=dt)
        prev = t
        rcm = complex_to_real_cm(state).mat
        results[int(k)] = eof_symmetric(2.0 * (rcm[0, 0] - rcm[0, 2]))
    return [results[k] for k in range(len(results))]


def eof_saturation(p: SystemParams) -> EofResult:
    """Long-time entanglement of formation of the symmetric two-mode amplifier:

    E_f(inf) = g(Delta(Gamma (2 nbar0 + 1) / (Gamma + 2 eta1))),

    which is positive exactly when eta1 / Gamma > nbar0 and holds in both the
    settling (Gamma > 2 eta1) and over-amplified regimes."""
    eta1, Gamma, nbar0 = _symmetric_drive_scalars(p)
    if Gamma <= 0:
        raise ValueError("requires a positive damping rate")
    z_inf = Gamma * (2 * nbar0 + 1.0) / (Gamma + 2 * eta1)
    return eof_symmetric(z_inf)


def steady_state_inseparable(p: SystemParams) -> bool:
    """Settled-regime entanglement window: Gamma nbar0 < eta1 < Gamma / 2.

    Nonempty only for nbar0 < 1/2; complements the over-amplified criterion."""
    eta1, Gamma, nbar0 = _symmetric_drive_scalars(p)
    return Gamma * nbar0 < eta1 < 0.5 * Gamma


def overamplified_vacuum_inseparable(p: SystemParams) -> bool:
    """Vacuum-input entanglement in the over-amplified branch:
    eta1 > max(nbar0 Gamma, Gamma / 2)."""
    eta1, Gamma, nbar0 = _symmetric_drive_scalars(p)
    return eta1 > max(nbar0 * Gamma, 0.5 * Gamma)


def entanglement_threshold(p: SystemParams) -> bool:
    """Combined criterion across both regimes: entangled iff eta1 / Gamma > nbar0."""
    eta1, Gamma, nbar0 = _symmetric_drive_scalars(p)
    if Gamma <= 0:
        return eta1 > 0
    return eta1 / Gamma > nbar0
