"""Brute-force validator on a truncated Fock space.

Everything here is deliberately independent of the closed-form machinery:
the master equation is integrated term by term with fixed-step RK4, and
characteristic functions come from tr[rho D(mu)] with matrix-exponential
displacement operators.  Gain channels leak probability past the cutoff;
the leak is monitored and reported as trace loss.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import CutoffTooSmallError, UnsupportedStateError
from .states import GaussianState, SystemParams

TRACE_LOSS_BUDGET = 1e-3


@dataclass(frozen=True, eq=False)
class FockDensity:
    """Density matrix on s modes truncated at Fock level `cutoff` per mode."""

    rho: np.ndarray
    cutoff: int
    s: int

    def __post_init__(self):
        dim = (self.cutoff + 1) ** self.s
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (dim, dim):
            raise ValueError(f"density matrix must be {dim}x{dim}, got {rho.shape}")
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return (self.cutoff + 1) ** self.s

    @property
    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    @property
    def trace_loss(self) -> float:
        return 1.0 - self.trace

    def hermiticity_defect(self) -> float:
        return float(np.abs(self.rho - self.rho.conj().T).max())

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T)).min())


def destroy(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), 1).astype(complex)


@lru_cache(maxsize=16)
def mode_operators(s: int, cutoff: int) -> tuple[np.ndarray, ...]:
    """Annihilation operators of each mode on the full truncated space."""
    a1 = destroy(cutoff)
    eye = np.eye(cutoff + 1, dtype=complex)
    ops = []
    for j in range(s):
        mats = [a1 if k == j else eye for k in range(s)]
        full = mats[0]
        for m in mats[1:]:
            full = np.kron(full, m)
        ops.append(full)
    return tuple(ops)


class _LindbladTerms:
    """Precompiled right-hand side: rho -> D rho + rho E + sum_k L_k rho R_k."""

    def __init__(self, p: SystemParams, cutoff: int):
        s = p.s
        ops = mode_operators(s, cutoff)
        dim = ops[0].shape[0]
        D = np.zeros((dim, dim), dtype=complex)
        E = np.zeros((dim, dim), dtype=complex)
        sandwiches: list[tuple[np.ndarray, np.ndarray]] = []

        # Pair drive: 0.5 [sum eta_jk a_j^+ a_k^+ - eta_jk* a_j a_k, rho].
        if np.abs(p.eta).max() > 0:
            K = np.zeros((dim, dim), dtype=complex)
            for j in range(s):
                for k in range(s):
                    if p.eta[j, k] != 0:
                        K += p.eta[j, k] * ops[j].conj().T @ ops[k].conj().T
                        K -= p.eta[j, k].conjugate() * ops[j] @ ops[k]
            D += 0.5 * K
            E -= 0.5 * K

        for j in range(s):
            a = ops[j]
            ad = a.conj().T
            n_exact = ad @ a  # diagonal, exact under truncation
            # aa^+ with the exact diagonal so the gain channel leaks (physically:
            # probability pumped past the cutoff leaves the box).
            aad_exact = n_exact + np.eye(dim, dtype=complex)
            G = float(p.gamma_amp[j])
            if G > 0:
                c_down = 0.5 * G * (p.nbar[j] + 1.0)
                sandwiches.append((2.0 * c_down * a, ad))
                D -= c_down * n_exact
                E -= c_down * n_exact
                c_up = 0.5 * G * p.nbar[j]
                if c_up > 0:
                    sandwiches.append((2.0 * c_up * ad, a))
                    D -= c_up * aad_exact
                    E -= c_up * aad_exact
                w = complex(p.w[j])
                if w != 0:
                    c3 = 0.5 * G * w.conjugate()
                    sandwiches.append((-2.0 * c3 * a, a))
                    D += c3 * a @ a
                    E += c3 * a @ a
                    c4 = 0.5 * G * w
                    sandwiches.append((-2.0 * c4 * ad, ad))
                    D += c4 * ad @ ad
                    E += c4 * ad @ ad
            gp = float(p.gamma_phase[j])
            if gp > 0:
                c5 = 0.5 * gp
                sandwiches.append((2.0 * c5 * n_exact, n_exact))
                D -= c5 * n_exact @ n_exact
                E -= c5 * n_exact @ n_exact

        self.D = D
        self.E = E
        self.sandwiches = sandwiches

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        out = self.D @ rho + rho @ self.E
        for left, right in self.sandwiches:
            out += left @ rho @ right
        return out

    def rate_bound(self) -> float:
        bound = np.abs(self.D).sum(axis=1).max() + np.abs(self.E).sum(axis=1).max()
        for left, right in self.sandwiches:
            bound += np.abs(left).sum(axis=1).max() * np.abs(right).sum(axis=1).max()
        return float(bound)


def lindblad_rhs(rho: FockDensity, p: SystemParams) -> np.ndarray:
    """d rho / dt of the master equation on the truncated space."""
    if p.s != rho.s:
        raise ValueError("state and parameters disagree on the mode count")
    return _LindbladTerms(p, rho.cutoff).rhs(rho.rho)


def stability_dt(p: SystemParams, cutoff: int) -> float:
    """Largest safe RK4 step estimated from an upper bound on the generator norm."""
    return 2.5 / _LindbladTerms(p, cutoff).rate_bound()


def integrate(
    rho0: FockDensity,
    p: SystemParams,
    t: float,
    dt: float,
    *,
    auto_expand: bool = False,
    trace_tol: float = TRACE_LOSS_BUDGET,
    _depth: int = 0,
) -> FockDensity:
    """Fixed-step RK4 with per-step Hermitian symmetrization.

    Raises CutoffTooSmallError when trace loss exceeds `trace_tol`; with
    auto_expand the run restarts from rho0 embedded at twice the cutoff.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    terms = _LindbladTerms(p, rho0.cutoff)
    dt_max = 2.5 / terms.rate_bound()
    if dt > dt_max:
        raise ValueError(f"dt = {dt:g} exceeds the RK4 stability estimate {dt_max:.3e}")
    steps = max(1, int(round(t / dt)))
    h = t / steps
    rho = rho0.rho.copy()

    def check_loss(rho):
        loss = 1.0 - float(np.trace(rho).real)
        if loss > trace_tol:
            if auto_expand and _depth < 2:
                bigger = embed(rho0, 2 * rho0.cutoff)
                return integrate(
                    bigger, p, t, dt, auto_expand=True, trace_tol=trace_tol, _depth=_depth + 1
                )
            raise CutoffTooSmallError(loss, rho0.cutoff, 2 * rho0.cutoff)
        return None

    for step in range(steps):
        k1 = terms.rhs(rho)
        k2 = terms.rhs(rho + 0.5 * h * k1)
        k3 = terms.rhs(rho + 0.5 * h * k2)
        k4 = terms.rhs(rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        if step % 50 == 0 or step == steps - 1:
            expanded = check_loss(rho)
            if expanded is not None:
                return expanded
    return FockDensity(rho=rho, cutoff=rho0.cutoff, s=rho0.s)


def embed(rho: FockDensity, cutoff: int) -> FockDensity:
    """Zero-pad a density matrix into a larger per-mode cutoff."""
    if cutoff < rho.cutoff:
        raise ValueError("target cutoff must not shrink")
    small, big = rho.cutoff + 1, cutoff + 1
    out = np.zeros((big**rho.s, big**rho.s), dtype=complex)
    idx = np.arange(small)
    if rho.s == 1:
        out[np.ix_(idx, idx)] = rho.rho
    else:
        sel = (idx[:, None] * big + idx[None, :]).ravel()
        out[np.ix_(sel, sel)] = rho.rho
    return FockDensity(rho=out, cutoff=cutoff, s=rho.s)


def displacement_operator(mu: complex, cutoff: int) -> np.ndarray:
    """exp(mu a^+ - mu* a) on the truncated space (accurate for |mu| << sqrt(cutoff))."""
    a = destroy(cutoff)
    return expm(mu * a.conj().T - np.conj(mu) * a)


def chi_from_rho(rho: FockDensity, mu) -> complex:
    """tr[rho (D(mu_1) x ... x D(mu_s))]."""
    mu = np.atleast_1d(np.asarray(mu, dtype=complex))
    if len(mu) != rho.s:
        raise ValueError("mu must supply one amplitude per mode")
    D = displacement_operator(complex(mu[0]), rho.cutoff)
    for val in mu[1:]:
        D = np.kron(D, displacement_operator(complex(val), rho.cutoff))
    return complex(np.trace(rho.rho @ D))


def chi_grid_from_rho(rho: FockDensity, mu_grid: np.ndarray) -> np.ndarray:
    return np.array([chi_from_rho(rho, mu) for mu in np.atleast_2d(mu_grid)])


def purity_from_rho(rho: FockDensity) -> float:
    """Tr rho^2 (real for Hermitian rho)."""
    return float(np.einsum("ij,ji->", rho.rho, rho.rho).real)


def coherent_fock(m: complex, cutoff: int) -> np.ndarray:
    """Poisson amplitudes exp(-|m|^2/2) m^n / sqrt(n!)."""
    m = complex(m)
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[0] = np.exp(-0.5 * abs(m) ** 2)
    for n in range(1, cutoff + 1):
        amps[n] = amps[n - 1] * m / np.sqrt(n)
    return amps


def squeezed_fock(r: float, phi: float, cutoff: int) -> np.ndarray:
    """Squeezed-vacuum amplitudes (e^{i phi} tanh r)^k sqrt((2k)!) / (2^k k! sqrt(cosh r))
    on the even levels n = 2k."""
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[0] = 1.0 / np.sqrt(np.cosh(r))
    factor = np.exp(1j * phi) * np.tanh(r)
    for n in range(2, cutoff + 1, 2):
        amps[n] = amps[n - 2] * factor * np.sqrt(n * (n - 1.0)) / n
    return amps


def thermal_fock(N: float, cutoff: int) -> np.ndarray:
    n = np.arange(cutoff + 1, dtype=float)
    if N == 0:
        p = np.zeros(cutoff + 1)
        p[0] = 1.0
    else:
        p = (N / (N + 1.0)) ** n / (N + 1.0)
    return np.diag(p.astype(complex))


def tmsv_fock(r: float, cutoff: int) -> np.ndarray:
    """Two-mode squeezed vacuum ket, Schmidt amplitudes tanh^n r / cosh r."""
    dim = cutoff + 1
    psi = np.zeros(dim * dim, dtype=complex)
    for n in range(dim):
        psi[n * dim + n] = np.tanh(r) ** n / np.cosh(r)
    return psi


def two_mode_squeezer(r: float, cutoff: int) -> np.ndarray:
    a1, a2 = mode_operators(2, cutoff)
    return expm(r * (a1.conj().T @ a2.conj().T - a1 @ a2))


def one_mode_squeezer(r: float, phi: float, cutoff: int) -> np.ndarray:
    a = destroy(cutoff)
    zeta = r * np.exp(1j * phi)
    return expm(0.5 * (zeta * a.conj().T @ a.conj().T - np.conj(zeta) * a @ a))


def _one_mode_fock(A: complex, B: complex, m: complex, cutoff: int) -> np.ndarray:
    """Displaced squeezed thermal density matrix from one-mode covariance scalars."""
    a_val = float(np.real(A))
    disc = a_val * a_val - abs(B) ** 2
    if disc < 0.25 - 1e-9:
        raise UnsupportedStateError("one-mode covariance scalars are unphysical")
    half_width = np.sqrt(max(disc, 0.25))
    N = max(half_width - 0.5, 0.0)
    cosh2r = a_val / half_width
    r = 0.5 * float(np.arccosh(max(cosh2r, 1.0)))
    phi = float(np.angle(B)) if abs(B) > 0 else 0.0
    if N < 1e-12:
        psi = squeezed_fock(r, phi, cutoff)
        rho = np.outer(psi, psi.conj())
    else:
        S = one_mode_squeezer(r, phi, cutoff)
        rho = S @ thermal_fock(N, cutoff) @ S.conj().T
    if m != 0:
        D = displacement_operator(m, cutoff)
        rho = D @ rho @ D.conj().T
    return rho


def gaussian_to_fock(state: GaussianState, cutoff: int) -> FockDensity:
    """Fock representation of states from the known constructor families.

    One mode: any Gaussian state (displaced squeezed thermal).  Two modes:
    products of one-mode states, or symmetric two-mode squeezed thermal
    states.  Anything else raises UnsupportedStateError.
    """
    A, B = state.blocks
    if state.s == 1:
        rho = _one_mode_fock(A[0, 0], B[0, 0], complex(state.m[0]), cutoff)
        return FockDensity(rho=rho, cutoff=cutoff, s=1)
    if state.s != 2:
        raise UnsupportedStateError("Fock builder supports one and two modes")
    scale = max(np.abs(state.cm).max(), 1.0)
    product = abs(A[0, 1]) <= 1e-12 * scale and abs(B[0, 1]) <= 1e-12 * scale
    if product:
        rho1 = _one_mode_fock(A[0, 0], B[0, 0], complex(state.m[0]), cutoff)
        rho2 = _one_mode_fock(A[1, 1], B[1, 1], complex(state.m[1]), cutoff)
        return FockDensity(rho=np.kron(rho1, rho2), cutoff=cutoff, s=2)
    symmetric = (
        abs(A[0, 0] - A[1, 1]) <= 1e-12 * scale
        and abs(A[0, 1]) <= 1e-12 * scale
        and abs(B[0, 0]) <= 1e-12 * scale
        and abs(B[1, 1]) <= 1e-12 * scale
        and abs(B[0, 1].imag) <= 1e-12 * scale
        and np.abs(state.m).max() <= 1e-12
    )
    if not symmetric:
        raise UnsupportedStateError(
            "two-mode Fock builder covers products and symmetric squeezed thermal states"
        )
    a_val = float(A[0, 0].real)
    b_val = float(B[0, 1].real)
    disc = a_val * a_val - b_val * b_val
    if disc < 0.25 - 1e-9:
        raise UnsupportedStateError("two-mode covariance scalars are unphysical")
    half_width = np.sqrt(max(disc, 0.25))
    N = max(half_width - 0.5, 0.0)
    arg = max(a_val / half_width, 1.0)
    r = 0.5 * float(np.arccosh(arg)) * (1.0 if b_val >= 0 else -1.0)
    if N < 1e-12:
        psi = tmsv_fock(r, cutoff)
        rho = np.outer(psi, psi.conj())
    else:
        S = two_mode_squeezer(r, cutoff)
        th = thermal_fock(N, cutoff)
        rho = S @ np.kron(th, th) @ S.conj().T
    return FockDensity(rho=rho, cutoff=cutoff, s=2)
