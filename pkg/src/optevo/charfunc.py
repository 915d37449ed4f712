"""Pointwise characteristic-function evolution, Gaussian or not.

Evaluators are vectorized: they accept mu of shape (..., s) and return values
of shape (...).  The evolution maps below act on arbitrary initial chi, so
non-Gaussian states (supplied as black-box evaluators) propagate exactly for
every channel that admits a closed-form or quadrature solution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import eval_laguerre

from .evolution import matrix_cosh_sinh, propagate_mn, solve_alpha_beta, SteadyAlphaBeta
from .states import GaussianState, SystemParams


@dataclass(frozen=True, eq=False)
class CharFunc:
    """Characteristic function chi(mu) of an s-mode state.

    fn        vectorized evaluator, (..., s) complex -> (...) complex
    gaussian  True when a GaussianState backing is attached
    """

    fn: Callable[[np.ndarray], np.ndarray]
    s: int
    gaussian: bool = False
    state: Optional[GaussianState] = None

    def __call__(self, mu) -> np.ndarray:
        mu = np.asarray(mu, dtype=complex)
        if mu.shape[-1] != self.s:
            raise ValueError(f"mu must have trailing dimension {self.s}")
        return self.fn(mu)


def _quad_forms(mu: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # (mu, -mu*) [[A, B*], [B, A*]] (mu*, -mu)^T, real for Hermitian A / symmetric B
    ta = np.einsum("...j,jk,...k->...", mu, A, mu.conj())
    tb = np.einsum("...j,jk,...k->...", mu.conj(), B, mu.conj())
    return 2.0 * ta.real - 2.0 * tb.real


def eval_gaussian_chi(state: GaussianState, mu) -> np.ndarray:
    """chi(mu) = exp[mu m^+ - mu* m^T - (1/2)(mu, -mu*) gamma (mu*, -mu)^T]."""
    mu = np.asarray(mu, dtype=complex)
    A, B = state.blocks
    linear = np.einsum("...j,j->...", mu, state.m.conj()) - np.einsum(
        "...j,j->...", mu.conj(), state.m
    )
    return np.exp(linear - 0.5 * _quad_forms(mu, A, B))


def gaussian_charfunc(state: GaussianState) -> CharFunc:
    return CharFunc(fn=lambda mu: eval_gaussian_chi(state, mu), s=state.s, gaussian=True, state=state)


def fock_state_charfunc(n: int) -> CharFunc:
    """chi of the one-mode number state |n>: exp(-|mu|^2/2) L_n(|mu|^2)."""
    if n < 0:
        raise ValueError("n must be a nonnegative integer")

    def fn(mu):
        x = np.abs(mu[..., 0]) ** 2
        return np.exp(-0.5 * x) * eval_laguerre(n, x)

    return CharFunc(fn=fn, s=1, gaussian=(n == 0))


def _require_zero(vec: np.ndarray, what: str):
    if np.abs(vec).max() > 0:
        raise ValueError(f"this solution requires {what} = 0")


def evolve_chi_amplification(chi0: CharFunc, p: SystemParams, t: float) -> CharFunc:
    """Pure parametric drive: chi(mu, t) = chi0(mu C* - mu* S) with (C, S) the
    hyperbolic pair of eta t."""
    _require_zero(p.gamma_amp, "Gamma")
    _require_zero(p.gamma_phase, "gamma_phase")
    C, S = matrix_cosh_sinh(p.eta * t)
    M = C.conj()
    N = -S

    def fn(mu):
        nu = mu @ M + mu.conj() @ N
        return chi0(nu)

    return CharFunc(fn=fn, s=p.s)


def _damping_envelope(mu: np.ndarray, p: SystemParams, t: float) -> np.ndarray:
    fade = 1.0 - np.exp(-p.gamma_amp * t)
    quad = (p.nbar + 0.5) * np.abs(mu) ** 2
    sq = -0.5 * (p.w.conj() * mu**2 + p.w * mu.conj() ** 2).real
    return np.exp(-np.sum(fade * (quad + sq), axis=-1))


def evolve_chi_amplitude_damping(chi0: CharFunc, p: SystemParams, t: float) -> CharFunc:
    """Loss into a thermal or squeezed bath:

    chi(mu, t) = chi0(mu e^{-Gamma t/2})
                 exp{-sum_j (1 - e^{-Gamma_j t}) [(nbar_j + 1/2)|mu_j|^2
                     - w_j* mu_j^2 / 2 - w_j mu_j*^2 / 2]}
    """
    _require_zero(np.abs(p.eta), "eta")
    _require_zero(p.gamma_phase, "gamma_phase")
    decay = np.exp(-0.5 * p.gamma_amp * t)

    def fn(mu):
        return chi0(mu * decay) * _damping_envelope(mu, p, t)

    return CharFunc(fn=fn, s=p.s)


def _phase_nodes(p: SystemParams, t: float, quad_order: int):
    """Tensor Gauss-Hermite nodes for the per-mode phase diffusion kernels.

    Returns (phases, weights): phases has shape (K, s) with entries e^{i x_j},
    weights sum to exactly 1.  Modes with gamma_j t = 0 contribute no nodes.
    """
    active = [j for j in range(p.s) if p.gamma_phase[j] * t > 0]
    if not active:
        return np.ones((1, p.s), dtype=complex), np.ones(1)
    u, wts = np.polynomial.hermite.hermgauss(quad_order)
    wts = wts / wts.sum()
    phases = np.ones((quad_order ** len(active), p.s), dtype=complex)
    weights = np.ones(quad_order ** len(active))
    for pos, j in enumerate(active):
        x = np.sqrt(2.0 * p.gamma_phase[j] * t) * u
        reps = quad_order ** (len(active) - pos - 1)
        tiles = quad_order**pos
        col = np.tile(np.repeat(np.exp(1j * x), reps), tiles)
        phases[:, j] = col
        weights = weights * np.tile(np.repeat(wts, reps), tiles)
    return phases, weights


def evolve_chi_phase_damping(
    chi0: CharFunc, p: SystemParams, t: float, quad_order: int = 64
) -> CharFunc:
    """Pure dephasing: Gaussian convolution over mode phases,

    chi(mu, t) = int dx chi0(mu e^{ix}) prod_j N(x_j; 0, gamma_j t),

    evaluated per mode by Gauss-Hermite quadrature of the given order."""
    _require_zero(np.abs(p.eta), "eta")
    _require_zero(p.gamma_amp, "Gamma")
    phases, weights = _phase_nodes(p, t, quad_order)

    def fn(mu):
        vals = chi0(mu[..., None, :] * phases)
        return np.einsum("...k,k->...", vals, weights.astype(complex))

    return CharFunc(fn=fn, s=p.s)


def evolve_chi_amp_phase(
    chi0: CharFunc, p: SystemParams, t: float, quad_order: int = 64
) -> CharFunc:
    """Simultaneous amplitude and phase damping (thermal baths only):

    chi(mu, t) = int dx chi0(mu e^{-Gamma t/2 + ix}) prod_j N(x_j; 0, gamma_j t)
                 exp[-(1 - e^{-Gamma_j t})(nbar_j + 1/2)|mu_j|^2].

    Bath squeezing is rejected: the squeezed source term is not phase
    invariant, so the two channels no longer commute.
    """
    _require_zero(np.abs(p.eta), "eta")
    if np.abs(p.w).max() > 0:
        raise ValueError("combined amplitude and phase damping is solved for w = 0 only")
    decay = np.exp(-0.5 * p.gamma_amp * t)
    phases, weights = _phase_nodes(p, t, quad_order)

    def fn(mu):
        vals = chi0((mu * decay)[..., None, :] * phases)
        mixed = np.einsum("...k,k->...", vals, weights.astype(complex))
        return mixed * _damping_envelope(mu, p, t)

    return CharFunc(fn=fn, s=p.s)


def evolve_chi_general(
    chi0: CharFunc,
    p: SystemParams,
    t: float,
    *,
    allow_numeric: bool = True,
    dt: float = 1e-3,
) -> CharFunc:
    """Drive plus amplitude damping for arbitrary initial chi:

    chi(mu, t) = chi0(nu) exp[Q(nu)/2 - Q(mu)/2],   nu = mu M + mu* N,

    with Q the quadratic form of the steady coefficient matrix.  Degeneracy
    errors from the coefficient solver propagate (no silent fallback here).
    """
    _require_zero(p.gamma_phase, "gamma_phase")
    mn = propagate_mn(p, t, allow_numeric=allow_numeric, dt=dt)
    if p.gamma_amp.max() == 0.0:
        ab = SteadyAlphaBeta(
            alpha=np.zeros((p.s, p.s), dtype=complex), beta=np.zeros((p.s, p.s), dtype=complex)
        )
    else:
        ab = solve_alpha_beta(p)
    M, N = mn.M, mn.N
    alpha, beta = ab.alpha, ab.beta

    def fn(mu):
        nu = mu @ M + mu.conj() @ N
        q_nu = _quad_forms(nu, alpha, beta)
        q_mu = _quad_forms(mu, alpha, beta)
        return chi0(nu) * np.exp(0.5 * q_nu - 0.5 * q_mu)

    return CharFunc(fn=fn, s=p.s)


def phase_quadrature_deviation(
    chi0: CharFunc, p: SystemParams, t: float, mu_grid: np.ndarray, quad_order: int = 64
) -> float:
    """Max change of the dephased chi on a grid when the quadrature order doubles.

    Values above ~1e-8 flag an insufficient order for the requested channel.
    """
    lo = evolve_chi_phase_damping(chi0, p, t, quad_order)
    hi = evolve_chi_phase_damping(chi0, p, t, 2 * quad_order)
    return float(np.abs(lo(mu_grid) - hi(mu_grid)).max())


def chi_grid(s: int = 1, half_width: float = 2.0, points: int = 5) -> np.ndarray:
    """Cartesian verification grid: Re and Im of every mode span +-half_width."""
    axis = np.linspace(-half_width, half_width, points)
    re_im = [axis] * (2 * s)
    mesh = np.meshgrid(*re_im, indexing="ij")
    flat = [m.ravel() for m in mesh]
    mu = np.empty((flat[0].size, s), dtype=complex)
    for j in range(s):
        mu[:, j] = flat[2 * j] + 1j * flat[2 * j + 1]
    return mu
