"""Propagators for parametric drive with amplitude damping.

The characteristic function evolves by argument substitution nu = mu M + mu* N
plus a Gaussian envelope fixed by constant coefficient matrices (alpha, beta).
M and N solve

    dM/dt = -eta* N - Gamma M / 2,      dN/dt = -eta M - Gamma N / 2,

with M(0) = I, N(0) = 0 and Gamma = diag(Gamma_j); alpha (Hermitian) and beta
(symmetric) solve the stationarity conditions

    2 eta alpha + 2 alpha* eta - Gamma beta - beta Gamma + Gamma w + w Gamma = 0,
    Gamma alpha + alpha Gamma - 2 eta* beta - 2 beta* eta
        - Gamma (nbar + 1/2) - (nbar + 1/2) Gamma = 0.

Closed forms exist when all damping rates are equal or when eta is real; a
fixed-step RK4 integrator covers the remaining (complex eta, unequal damping)
case.  Row-vector convention throughout: mu M means mu @ M.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import DegenerateSteadyStateError, OverAmplificationError
from .states import (
    SIGMA0,
    SIGMA1,
    SIGMA2,
    SIGMA3,
    GaussianState,
    SystemParams,
    build_cm,
)


def _sinhc(x: float) -> float:
    # sinh(x)/x with the x -> 0 limit.
    if abs(x) < 1e-6:
        return 1.0 + x * x / 6.0
    return float(np.sinh(x) / x)


def matrix_cosh_sinh(xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Even/odd hyperbolic series of a complex matrix argument.

    Returns (C, S) with

        C = I + xi xi*/2! + (xi xi*)^2/4! + ...
        S = xi + xi xi* xi/3! + (xi xi*)^2 xi/5! + ...

    computed by Taylor summation after halving xi until ||xi|| <= 1/2, then
    repeated doubling via C(2x) = 2 C(x)^2 - I and S(2x) = 2 C(x) S(x).
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=complex))
    n = xi.shape[0]
    eye = np.eye(n, dtype=complex)
    norm = np.linalg.norm(xi, 1)
    k = 0
    if norm > 0.5:
        k = int(np.ceil(np.log2(norm / 0.5)))
    xs = xi / (2**k)
    K = xs @ xs.conj()
    C = eye.copy()
    S = xs.copy()
    term_c = eye.copy()
    term_s = xs.copy()
    for m in range(1, 30):
        term_c = term_c @ K / ((2 * m - 1) * (2 * m))
        term_s = K @ term_s / ((2 * m) * (2 * m + 1))
        C = C + term_c
        S = S + term_s
        if max(np.abs(term_c).max(), np.abs(term_s).max()) < 1e-18:
            break
    for _ in range(k):
        S = 2.0 * C @ S
        C = 2.0 * C @ C - eye
    return C, S


@dataclass(frozen=True, eq=False)
class PropagatorMN:
    """Argument-substitution matrices at time t: nu = mu M + mu* N."""

    M: np.ndarray
    N: np.ndarray
    t: float


@dataclass(frozen=True, eq=False)
class SteadyAlphaBeta:
    """Constant envelope coefficients: alpha Hermitian, beta symmetric."""

    alpha: np.ndarray
    beta: np.ndarray


def _require_equal_damping(p: SystemParams) -> float:
    g = p.gamma_amp
    if g.max() - g.min() > 1e-12 * max(g.max(), 1.0):
        raise ValueError("this closed form requires equal damping rates on all modes")
    return float(g[0])


def propagate_mn_equal_damping(p: SystemParams, t: float) -> PropagatorMN:
    """Closed form for equal damping: M = exp(-Gamma t/2) C*, N = -exp(-Gamma t/2) S."""
    Gamma = _require_equal_damping(p)
    C, S = matrix_cosh_sinh(p.eta * t)
    decay = np.exp(-0.5 * Gamma * t)
    return PropagatorMN(M=decay * C.conj(), N=-decay * S, t=float(t))


def _pauli_components(eta: np.ndarray) -> tuple[complex, complex, complex]:
    eta = np.asarray(eta, dtype=complex)
    if eta.shape != (2, 2):
        raise ValueError("expected a 2x2 drive matrix")
    if abs(eta[0, 1] - eta[1, 0]) > 1e-12 * max(np.abs(eta).max(), 1.0):
        raise ValueError("drive matrix must be symmetric")
    e0 = 0.5 * (eta[0, 0] + eta[1, 1])
    e3 = 0.5 * (eta[0, 0] - eta[1, 1])
    e1 = eta[0, 1]
    return e0, e1, e3


def two_mode_pauli_closed_form(eta: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Pauli-algebra closed form of matrix_cosh_sinh(eta t) for two modes.

    With eta = e0 s0 + e1 s1 + e3 s3, the Hermitian product eta eta* equals
    C s0 + B (sigma . b) with C = |e0|^2+|e1|^2+|e3|^2, A = |e0^2-e1^2-e3^2|,
    B = sqrt(C^2 - A^2).  The two spectral branches sit at C +- B; the product
    form below is identical because sqrt((C+A)/2) +- sqrt((C-A)/2) = sqrt(C +- B).
    """
    e0, e1, e3 = _pauli_components(eta)
    Cv = abs(e0) ** 2 + abs(e1) ** 2 + abs(e3) ** 2
    Av = abs(e0**2 - e1**2 - e3**2)
    Bv = float(np.sqrt(max(Cv**2 - Av**2, 0.0)))
    eta = np.asarray(eta, dtype=complex)
    if Bv < 1e-14 * max(Cv, 1.0):
        # eta eta* proportional to the identity: scalar branch.
        root = np.sqrt(Cv)
        cosh_part = np.cosh(root * t) * SIGMA0
        sinh_part = t * _sinhc(root * t) * eta
        return cosh_part, sinh_part
    bvec = (
        np.array(
            [
                e0 * e1.conjugate() + e1 * e0.conjugate(),
                1j * e3 * e1.conjugate() - 1j * e1 * e3.conjugate(),
                e0 * e3.conjugate() + e3 * e0.conjugate(),
            ]
        )
        / Bv
    )
    sb = bvec[0].real * SIGMA1 + bvec[1].real * SIGMA2 + bvec[2].real * SIGMA3
    u = np.sqrt((Cv + Av) / 2.0) * t
    v = np.sqrt((Cv - Av) / 2.0) * t
    cosh_part = np.cosh(u) * np.cosh(v) * SIGMA0 + np.sinh(u) * np.sinh(v) * sb
    sp = t * _sinhc(np.sqrt(Cv + Bv) * t)
    sm = t * _sinhc(np.sqrt(Cv - Bv) * t)
    sinh_part = 0.5 * (sp + sm) * eta + 0.5 * (sp - sm) * (sb @ eta)
    return cosh_part, sinh_part


def _require_real_eta(p: SystemParams) -> np.ndarray:
    if np.abs(p.eta.imag).max() > 1e-12 * max(np.abs(p.eta).max(), 1.0):
        raise ValueError("this closed form requires a real drive matrix")
    return p.eta.real.astype(float)


def propagate_mn_real_eta(p: SystemParams, t: float) -> PropagatorMN:
    """Closed form for real eta with arbitrary per-mode damping.

    M = [exp(-(eta + Gamma/2) t) + exp((eta - Gamma/2) t)] / 2
    N = [exp(-(eta + Gamma/2) t) - exp((eta - Gamma/2) t)] / 2
    """
    eta = _require_real_eta(p)
    half_g = 0.5 * np.diag(p.gamma_amp)
    plus = expm((-eta - half_g) * t)
    minus = expm((eta - half_g) * t)
    return PropagatorMN(
        M=0.5 * (plus + minus).astype(complex),
        N=0.5 * (plus - minus).astype(complex),
        t=float(t),
    )


def real_eta_closed_form_two_mode(p: SystemParams, t: float) -> PropagatorMN:
    """Two-mode Pauli form of the real-eta propagator (agrees with the expm route)."""
    eta = _require_real_eta(p)
    if p.s != 2:
        raise ValueError("two-mode form requires s = 2")
    e0, e1, e3 = (x.real for x in _pauli_components(eta.astype(complex)))
    g1, g2 = p.gamma_amp
    d4 = 0.25 * (g1 - g2)
    c1 = e0 + 0.25 * (g1 + g2)
    c2 = -e0 + 0.25 * (g1 + g2)
    vec1 = np.array([e1, 0.0, e3 + d4])
    vec2 = np.array([-e1, 0.0, -e3 + d4])
    b1 = float(np.linalg.norm(vec1))
    b2 = float(np.linalg.norm(vec2))

    def term(c, b, vec):
        sv = vec[0] * SIGMA1 + vec[1] * SIGMA2 + vec[2] * SIGMA3
        # sinh(b t) * (sigma . vec/b) written through sinhc so b -> 0 is regular
        return 0.5 * np.exp(-c * t) * (np.cosh(b * t) * SIGMA0 - t * _sinhc(b * t) * sv)

    t1 = term(c1, b1, vec1)
    t2 = term(c2, b2, vec2)
    return PropagatorMN(M=t1 + t2, N=t1 - t2, t=float(t))


def propagate_mn_numeric(p: SystemParams, t: float, dt: float = 1e-3) -> PropagatorMN:
    """Fixed-step RK4 integration of the M/N matrix equations."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    s = p.s
    eta = p.eta
    eta_c = eta.conj()
    half_g = 0.5 * np.diag(p.gamma_amp).astype(complex)
    M = np.eye(s, dtype=complex)
    N = np.zeros((s, s), dtype=complex)
    steps = max(1, int(round(t / dt)))
    h = t / steps

    def rhs(M, N):
        return -eta_c @ N - half_g @ M, -eta @ M - half_g @ N

    for _ in range(steps):
        k1m, k1n = rhs(M, N)
        k2m, k2n = rhs(M + 0.5 * h * k1m, N + 0.5 * h * k1n)
        k3m, k3n = rhs(M + 0.5 * h * k2m, N + 0.5 * h * k2n)
        k4m, k4n = rhs(M + h * k3m, N + h * k3n)
        M = M + (h / 6.0) * (k1m + 2 * k2m + 2 * k3m + k4m)
        N = N + (h / 6.0) * (k1n + 2 * k2n + 2 * k3n + k4n)
    return PropagatorMN(M=M, N=N, t=float(t))


def propagate_mn(
    p: SystemParams, t: float, *, allow_numeric: bool = True, dt: float = 1e-3
) -> PropagatorMN:
    """Pick the applicable propagator: equal damping, real eta, or numeric fallback."""
    g = p.gamma_amp
    if g.max() - g.min() <= 1e-12 * max(g.max(), 1.0):
        return propagate_mn_equal_damping(p, t)
    if np.abs(p.eta.imag).max() <= 1e-12 * max(np.abs(p.eta).max(), 1.0):
        return propagate_mn_real_eta(p, t)
    if allow_numeric:
        return propagate_mn_numeric(p, t, dt)
    raise ValueError(
        "no closed-form propagator for complex eta with unequal damping; "
        "enable the numeric fallback"
    )


def block_propagator(mn: PropagatorMN) -> np.ndarray:
    """2s x 2s action of (M, N) on the (mu, -mu*) row vector."""
    return np.block([[mn.M, -mn.N.conj()], [-mn.N, mn.M.conj()]])


def alpha_beta_residuals(p: SystemParams, ab: SteadyAlphaBeta) -> tuple[np.ndarray, np.ndarray]:
    """Residual matrices of the two stationarity conditions (zero at a solution)."""
    alpha, beta = ab.alpha, ab.beta
    G = p.gamma_matrix()
    wm = np.diag(p.w)
    nm = np.diag(p.nbar + 0.5).astype(complex)
    r1 = 2 * p.eta @ alpha + 2 * alpha.conj() @ p.eta - G @ beta - beta @ G + G @ wm + wm @ G
    r2 = G @ alpha + alpha @ G - 2 * p.eta.conj() @ beta - 2 * beta.conj() @ p.eta - G @ nm - nm @ G
    return r1, r2


def _pack_indices(s: int) -> list[tuple[str, int, int]]:
    idx: list[tuple[str, int, int]] = [("ad", j, j) for j in range(s)]
    for j in range(s):
        for k in range(j + 1, s):
            idx.append(("ar", j, k))
            idx.append(("ai", j, k))
    for j in range(s):
        for k in range(j, s):
            idx.append(("br", j, k))
            idx.append(("bi", j, k))
    return idx


def _unpack(x: np.ndarray, s: int, idx) -> tuple[np.ndarray, np.ndarray]:
    alpha = np.zeros((s, s), dtype=complex)
    beta = np.zeros((s, s), dtype=complex)
    for val, (kind, j, k) in zip(x, idx):
        if kind == "ad":
            alpha[j, j] += val
        elif kind == "ar":
            alpha[j, k] += val
            alpha[k, j] += val
        elif kind == "ai":
            alpha[j, k] += 1j * val
            alpha[k, j] -= 1j * val
        elif kind == "br":
            beta[j, k] += val
            if j != k:
                beta[k, j] += val
        elif kind == "bi":
            beta[j, k] += 1j * val
            if j != k:
                beta[k, j] += 1j * val
    return alpha, beta


def _equation_rows(r1: np.ndarray, r2: np.ndarray, s: int) -> np.ndarray:
    rows = []
    for j in range(s):
        for k in range(j, s):
            rows.append(r1[j, k].real)
            rows.append(r1[j, k].imag)
    for j in range(s):
        rows.append(r2[j, j].real)
    for j in range(s):
        for k in range(j + 1, s):
            rows.append(r2[j, k].real)
            rows.append(r2[j, k].imag)
    return np.array(rows)


def solve_alpha_beta(p: SystemParams) -> SteadyAlphaBeta:
    """Solve the stationarity conditions as one real linear system (dense LU).

    Raises DegenerateSteadyStateError when the system is rank deficient, which
    happens exactly at the Gamma = 2|eta| degeneracy (and for Gamma = 0).
    """
    s = p.s
    idx = _pack_indices(s)
    n = len(idx)
    zero = SteadyAlphaBeta(
        alpha=np.zeros((s, s), dtype=complex), beta=np.zeros((s, s), dtype=complex)
    )
    const = _equation_rows(*alpha_beta_residuals(p, zero), s)
    A = np.zeros((n, n))
    for i in range(n):
        x = np.zeros(n)
        x[i] = 1.0
        al, be = _unpack(x, s, idx)
        A[:, i] = _equation_rows(*alpha_beta_residuals(p, SteadyAlphaBeta(al, be)), s) - const
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= 1e-12 * max(sv[0], 1.0):
        raise DegenerateSteadyStateError(
            "stationary coefficient system is singular (Gamma = 2|eta| degeneracy or Gamma = 0)"
        )
    x = np.linalg.solve(A, -const)
    alpha, beta = _unpack(x, s, idx)
    ab = SteadyAlphaBeta(alpha=alpha, beta=beta)
    r1, r2 = alpha_beta_residuals(p, ab)
    res = max(np.abs(r1).max(), np.abs(r2).max())
    if res > 1e-10 * max(1.0, np.abs(alpha).max(), np.abs(beta).max()):
        raise DegenerateSteadyStateError(f"steady coefficient solve left residual {res:.3e}")
    return ab


def one_mode_alpha_beta(p: SystemParams) -> SteadyAlphaBeta:
    """Scalar closed form (valid away from Gamma = 2|eta|):

    alpha = Gamma [Gamma (nbar + 1/2) + eta* w + eta w*] / (Gamma^2 - 4|eta|^2)
    beta  = [2 Gamma eta (nbar + 1/2) + (Gamma^2 - 2|eta|^2) w + 2 eta^2 w*]
            / (Gamma^2 - 4|eta|^2)
    """
    if p.s != 1:
        raise ValueError("closed form is for one mode")
    eta = complex(p.eta[0, 0])
    G = float(p.gamma_amp[0])
    nb = float(p.nbar[0])
    w = complex(p.w[0])
    D = G * G - 4 * abs(eta) ** 2
    if abs(D) < 1e-12:
        raise DegenerateSteadyStateError("Gamma = 2|eta|: no bounded steady quadratic form")
    alpha = G * (G * (nb + 0.5) + (eta.conjugate() * w).real * 2.0) / D
    beta = (2 * G * eta * (nb + 0.5) + (G * G - 2 * abs(eta) ** 2) * w + 2 * eta * eta * w.conjugate()) / D
    return SteadyAlphaBeta(
        alpha=np.array([[alpha]], dtype=complex), beta=np.array([[beta]], dtype=complex)
    )


def steady_coefficient_matrix(ab: SteadyAlphaBeta) -> np.ndarray:
    return build_cm(ab.alpha, ab.beta)


def _cm_rhs(A: np.ndarray, B: np.ndarray, p: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    # Linear flow of the covariance blocks implied by the diffusion equation.
    eta = p.eta
    G = p.gamma_matrix()
    src_a = np.diag(p.gamma_amp * (p.nbar + 0.5)).astype(complex)
    src_b = np.diag(p.gamma_amp * p.w)
    dA = eta.conj() @ B + B.conj() @ eta - 0.5 * (G @ A + A @ G) + src_a
    dB = eta @ A + A.conj() @ eta - 0.5 * (G @ B + B @ G) + src_b
    return dA, dB


def _evolve_cm_numeric(state: GaussianState, p: SystemParams, t: float, dt: float) -> np.ndarray:
    A, B = state.blocks
    A = A.copy()
    B = B.copy()
    steps = max(1, int(round(t / dt)))
    h = t / steps
    for _ in range(steps):
        k1 = _cm_rhs(A, B, p)
        k2 = _cm_rhs(A + 0.5 * h * k1[0], B + 0.5 * h * k1[1], p)
        k3 = _cm_rhs(A + 0.5 * h * k2[0], B + 0.5 * h * k2[1], p)
        k4 = _cm_rhs(A + h * k3[0], B + h * k3[1], p)
        A = A + (h / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        B = B + (h / 6.0) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    return build_cm(0.5 * (A + A.conj().T), 0.5 * (B + B.T))


def evolve_first_moments(m: np.ndarray, mn: PropagatorMN) -> np.ndarray:
    """m(t) = M* m - N m* (column convention for the stored moment vector)."""
    return mn.M.conj() @ m - mn.N @ m.conj()


def evolve_gaussian(
    state: GaussianState,
    p: SystemParams,
    t: float,
    *,
    allow_numeric: bool = True,
    dt: float = 1e-3,
) -> GaussianState:
    """Exact Gaussian evolution under drive plus amplitude damping.

    gamma(t) = T (gamma(0) - G_ab) T^+ + G_ab with T = [[M, -N*], [-N, M*]] and
    G_ab = [[alpha, beta*], [beta, alpha*]].  Phase damping is not Gaussian;
    route such channels through the characteristic-function module instead.
    """
    if p.gamma_phase.max() > 0:
        raise ValueError("phase damping breaks Gaussianity; evolve the characteristic function")
    if state.s != p.s:
        raise ValueError("state and parameters disagree on the mode count")
    if t == 0:
        return state
    mn = propagate_mn(p, t, allow_numeric=allow_numeric, dt=dt)
    m_t = evolve_first_moments(state.m, mn)
    if p.gamma_amp.max() == 0.0:
        T = block_propagator(mn)
        cm_t = T @ state.cm @ T.conj().T
        return GaussianState(m=m_t, cm=cm_t)
    try:
        ab = solve_alpha_beta(p)
    except DegenerateSteadyStateError:
        if not allow_numeric:
            raise
        return GaussianState(m=m_t, cm=_evolve_cm_numeric(state, p, t, dt))
    T = block_propagator(mn)
    G_ab = steady_coefficient_matrix(ab)
    cm_t = T @ (state.cm - G_ab) @ T.conj().T + G_ab
    return GaussianState(m=m_t, cm=cm_t)


def decay_generator(p: SystemParams) -> np.ndarray:
    """Generator of the M/N flow; all eigenvalues in the left half plane
    is exactly the Gamma > 2|eta| contraction condition."""
    s = p.s
    half_g = 0.5 * np.diag(p.gamma_amp).astype(complex)
    return -np.block([[half_g, p.eta.conj()], [p.eta, half_g]])


def steady_state(p: SystemParams) -> GaussianState:
    """Gaussian fixed point [[alpha, beta*], [beta, alpha*]] with zero moments."""
    abscissa = float(np.linalg.eigvals(decay_generator(p)).real.max())
    if abscissa >= -1e-12:
        raise OverAmplificationError(
            f"no steady state: slowest decay rate {-abscissa:.3e} is not positive "
            "(requires Gamma > 2|eta|)"
        )
    ab = solve_alpha_beta(p)
    return GaussianState(m=np.zeros(p.s, dtype=complex), cm=steady_coefficient_matrix(ab))
