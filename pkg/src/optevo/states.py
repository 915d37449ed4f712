"""Gaussian state containers and covariance-matrix conventions.

A state of s optical modes is described by its characteristic function
chi(mu) = tr[rho D(mu)], D(mu) = exp(mu a^+ - mu* a).  Gaussian states are

    chi(mu) = exp[ mu m^+ - mu* m^T - (1/2) (mu, -mu*) gamma (mu*, -mu)^T ],

where m_j = <a_j> and the complex covariance matrix gamma has the block form

    gamma = [[A, B*], [B, A*]],   A_jk = <da_j^+ da_k> + delta_jk / 2,
                                  B_jk = <da_j da_k>   (da = a - <a>),

so A is Hermitian and B symmetric; the vacuum is gamma = I/2.  The real
quadrature convention (modes interleaved as x1, p1, x2, p2, ...) is reached
through the unitary L assembled from the per-mode cell [[i, i], [1, -1]]/sqrt(2)
acting on the (mu_j, -mu_j*) pair; vacuum variance is 1/2 there as well.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SIGMA0 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)

# Structural tolerance for Hermiticity/symmetry of covariance blocks.
STRUCTURE_TOL = 1e-9


def _vector(x, dtype=complex) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(x, dtype=dtype))
    if arr.ndim != 1:
        raise ValueError("expected a scalar or 1-d sequence")
    return arr


@dataclass(frozen=True, eq=False)
class SystemParams:
    """Parameters of the optical master equation.

    eta          complex symmetric s x s drive matrix (pair creation strength, 1/time)
    gamma_amp    amplitude damping rates Gamma_j >= 0
    nbar         bath thermal occupations nbar_j >= 0
    w            bath squeezing amplitudes w_j, |w_j|^2 <= nbar_j (nbar_j + 1)
    gamma_phase  phase damping rates gamma_j >= 0
    """

    eta: np.ndarray
    gamma_amp: np.ndarray
    nbar: np.ndarray
    w: np.ndarray
    gamma_phase: np.ndarray

    def __post_init__(self):
        eta = np.atleast_2d(np.asarray(self.eta, dtype=complex))
        gamma_amp = _vector(self.gamma_amp, float)
        nbar = _vector(self.nbar, float)
        w = _vector(self.w, complex)
        gamma_phase = _vector(self.gamma_phase, float)
        s = len(gamma_amp)
        if eta.shape != (s, s):
            raise ValueError(f"eta must be {s}x{s}, got {eta.shape}")
        scale = max(np.abs(eta).max(), 1.0)
        if np.abs(eta - eta.T).max() > 1e-12 * scale:
            raise ValueError("eta must be a (complex) symmetric matrix")
        if not (len(nbar) == len(w) == len(gamma_phase) == s):
            raise ValueError("rate vectors must share one length")
        if (gamma_amp < 0).any() or (nbar < 0).any() or (gamma_phase < 0).any():
            raise ValueError("rates and occupations must be nonnegative")
        if (np.abs(w) ** 2 > nbar * (nbar + 1) + 1e-12).any():
            raise ValueError("bath squeezing violates |w|^2 <= nbar (nbar + 1)")
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "gamma_amp", gamma_amp)
        object.__setattr__(self, "nbar", nbar)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "gamma_phase", gamma_phase)

    @property
    def s(self) -> int:
        return len(self.gamma_amp)

    def gamma_matrix(self) -> np.ndarray:
        return np.diag(self.gamma_amp).astype(complex)

    @classmethod
    def one_mode(cls, eta=0.0, Gamma=0.0, nbar=0.0, w=0.0, gamma_phase=0.0):
        return cls(
            eta=np.array([[eta]], dtype=complex),
            gamma_amp=[Gamma],
            nbar=[nbar],
            w=[w],
            gamma_phase=[gamma_phase],
        )

    @classmethod
    def two_mode_drive(cls, eta1, Gamma, nbar0=0.0, w=(0.0, 0.0), gamma_phase=(0.0, 0.0)):
        """Two modes with pure cross-mode drive eta = eta1 * sigma_1 and equal damping."""
        return cls(
            eta=eta1 * SIGMA1,
            gamma_amp=[Gamma, Gamma],
            nbar=[nbar0, nbar0],
            w=list(w),
            gamma_phase=list(gamma_phase),
        )


def build_cm(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Assemble [[A, B*], [B, A*]] from the Hermitian and symmetric blocks."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    return np.block([[A, B.conj()], [B, A.conj()]])


def split_cm(cm: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = cm.shape[0] // 2
    return cm[:s, :s], cm[s:, :s]


@dataclass(frozen=True, eq=False)
class GaussianState:
    """First moments m and complex covariance matrix of an s-mode Gaussian state."""

    m: np.ndarray
    cm: np.ndarray

    def __post_init__(self):
        m = _vector(self.m)
        cm = np.asarray(self.cm, dtype=complex)
        s = len(m)
        if cm.shape != (2 * s, 2 * s):
            raise ValueError(f"covariance matrix must be {2*s}x{2*s}, got {cm.shape}")
        A, B = split_cm(cm)
        scale = max(np.abs(cm).max(), 1.0)
        if np.abs(A - A.conj().T).max() > STRUCTURE_TOL * scale:
            raise ValueError("upper-left covariance block must be Hermitian")
        if np.abs(B - B.T).max() > STRUCTURE_TOL * scale:
            raise ValueError("lower-left covariance block must be symmetric")
        if (
            np.abs(cm[:s, s:] - B.conj()).max() > STRUCTURE_TOL * scale
            or np.abs(cm[s:, s:] - A.conj()).max() > STRUCTURE_TOL * scale
        ):
            raise ValueError("covariance matrix must have the [[A, B*], [B, A*]] block form")
        # Restore the block structure exactly so round trips are bit-stable.
        A = 0.5 * (A + A.conj().T)
        B = 0.5 * (B + B.T)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "cm", build_cm(A, B))

    @property
    def s(self) -> int:
        return len(self.m)

    @property
    def blocks(self) -> tuple[np.ndarray, np.ndarray]:
        return split_cm(self.cm)

    @classmethod
    def from_blocks(cls, A, B, m=None) -> "GaussianState":
        A = np.asarray(A, dtype=complex)
        if m is None:
            m = np.zeros(A.shape[0], dtype=complex)
        return cls(m=m, cm=build_cm(A, B))


def vacuum(s: int = 1) -> GaussianState:
    return make_coherent(np.zeros(s, dtype=complex))


def make_coherent(m0) -> GaussianState:
    """Coherent state(s) with amplitude m0 per mode; vacuum for m0 = 0."""
    m = _vector(m0)
    s = len(m)
    return GaussianState(m=m, cm=0.5 * np.eye(2 * s, dtype=complex))


def make_squeezed(r: float, phi: float = 0.0) -> GaussianState:
    """One-mode squeezed vacuum with squeeze parameter zeta = r exp(i phi)."""
    if r < 0:
        raise ValueError("squeeze magnitude r must be >= 0")
    cm = 0.5 * (
        np.cosh(2 * r) * SIGMA0
        + np.sinh(2 * r) * np.cos(phi) * SIGMA1
        + np.sinh(2 * r) * np.sin(phi) * SIGMA2
    )
    return GaussianState(m=np.zeros(1, dtype=complex), cm=cm)


def make_thermal(N: float) -> GaussianState:
    """One-mode thermal state with mean photon number N."""
    if N < 0:
        raise ValueError("mean photon number must be >= 0")
    return GaussianState(m=np.zeros(1, dtype=complex), cm=(N + 0.5) * np.eye(2, dtype=complex))


def make_two_mode_squeezed_thermal(N: float, r: float) -> GaussianState:
    """Two-mode squeezed thermal state (equal thermal occupancy N, squeezing r).

    Built from its real covariance matrix
    (N + 1/2) (cosh 2r sigma_0 x sigma_0 + sinh 2r sigma_1 x sigma_3)
    and converted to the complex block convention.
    """
    if N < 0:
        raise ValueError("mean photon number must be >= 0")
    rcm = (N + 0.5) * (
        np.cosh(2 * r) * np.kron(SIGMA0, SIGMA0) + np.sinh(2 * r) * np.kron(SIGMA1, SIGMA3)
    ).real
    cm = real_to_complex_cm(RealCM(mat=rcm))
    return GaussianState(m=np.zeros(2, dtype=complex), cm=cm)


@dataclass(frozen=True, eq=False)
class RealCM:
    """Real symmetric covariance matrix in the interleaved (x1, p1, x2, p2, ...) basis."""

    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] % 2:
            raise ValueError("real covariance matrix must be square with even dimension")
        scale = max(np.abs(mat).max(), 1.0)
        if np.abs(mat - mat.T).max() > STRUCTURE_TOL * scale:
            raise ValueError("real covariance matrix must be symmetric")
        object.__setattr__(self, "mat", 0.5 * (mat + mat.T))

    @property
    def s(self) -> int:
        return self.mat.shape[0] // 2

    def _require_two_modes(self):
        if self.s != 2:
            raise ValueError("named 2x2 blocks are defined for two-mode matrices only")

    @property
    def gamma_a(self) -> np.ndarray:
        self._require_two_modes()
        return self.mat[:2, :2]

    @property
    def gamma_b(self) -> np.ndarray:
        self._require_two_modes()
        return self.mat[2:, 2:]

    @property
    def gamma_c(self) -> np.ndarray:
        self._require_two_modes()
        return self.mat[:2, 2:]


def l_matrix(s: int) -> np.ndarray:
    """Unitary mapping the complex (mu, -mu*) basis to interleaved quadratures."""
    L = np.zeros((2 * s, 2 * s), dtype=complex)
    for j in range(s):
        L[2 * j, j] = 1j
        L[2 * j, s + j] = 1j
        L[2 * j + 1, j] = 1.0
        L[2 * j + 1, s + j] = -1.0
    return L / np.sqrt(2.0)


def complex_to_real_cm(state_or_cm) -> RealCM:
    """Conjugate the complex covariance matrix by L to the real quadrature form."""
    cm = state_or_cm.cm if isinstance(state_or_cm, GaussianState) else np.asarray(state_or_cm)
    s = cm.shape[0] // 2
    L = l_matrix(s)
    out = L @ cm @ L.conj().T
    if np.abs(out.imag).max() > 1e-9 * max(np.abs(out).max(), 1.0):
        raise ValueError("complex covariance matrix is malformed (nonreal quadrature form)")
    return RealCM(mat=out.real)


def real_to_complex_cm(rcm) -> np.ndarray:
    """Inverse of complex_to_real_cm; returns the complex 2s x 2s covariance matrix."""
    mat = rcm.mat if isinstance(rcm, RealCM) else np.asarray(rcm, dtype=float)
    if np.abs(mat - mat.T).max() > STRUCTURE_TOL * max(np.abs(mat).max(), 1.0):
        raise ValueError("real covariance matrix must be symmetric")
    s = mat.shape[0] // 2
    L = l_matrix(s)
    cm = L.conj().T @ mat.astype(complex) @ L
    A, B = split_cm(cm)
    return build_cm(0.5 * (A + A.conj().T), 0.5 * (B + B.T))


def symplectic_form(s: int) -> np.ndarray:
    """Block-diagonal symplectic form for interleaved quadratures."""
    cell = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = np.zeros((2 * s, 2 * s))
    for j in range(s):
        out[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = cell
    return out


def check_physical(state: GaussianState) -> float:
    """Minimum eigenvalue of sigma + (i/2) Omega; the state is physical iff >= 0.

    Diagnostic only: never raises, small negative values indicate rounding.
    """
    sigma = complex_to_real_cm(state).mat
    omega = symplectic_form(state.s)
    h = sigma.astype(complex) + 0.5j * omega
    return float(np.linalg.eigvalsh(h).min())


def is_physical(state: GaussianState, tol: float = 1e-9) -> bool:
    return check_physical(state) >= -tol
