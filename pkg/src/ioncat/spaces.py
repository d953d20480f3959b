"""Composite Hilbert space of one trapped ion in a single-mode cavity.

Three subsystems in a fixed tensor order:

    vibration (center-of-mass Fock space, dimension n_vib)
      x cavity (photon Fock space, dimension n_cav)
      x ion internal levels (two-level, |e> = index 0, |g> = index 1)

Both bosonic modes are truncated, and a configurable guard band of top Fock
levels per mode is reserved to absorb truncation artifacts.  Operator
identities (canonical commutators, unitarity of displacements, the dressing
identity in `ioncat.model`) are asserted only on the interior block, i.e. on
matrix elements whose row and column both avoid the guard band.

Qubit convention: sigma_z |e> = +|e>, so the excited state carries the higher
internal energy, and sigma_plus = |e><g|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOLS, Tolerances, herm_eig, kron

GUARD_DEFAULT = 5

EXCITED = 0
GROUND = 1

SIGMA_Z = np.diag([1.0 + 0j, -1.0])
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)   # |e><g|
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |g><e|
SIGMA_X = SIGMA_PLUS + SIGMA_MINUS
for _m in (SIGMA_Z, SIGMA_PLUS, SIGMA_MINUS, SIGMA_X):
    _m.flags.writeable = False
del _m

SLOTS = ("vib", "cav", "qubit")


@dataclass(frozen=True)
class SpaceSignature:
    """Identity of the composite space: dimensions in the fixed tensor order."""

    n_vib: int
    n_cav: int

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.n_vib, self.n_cav, 2)

    @property
    def total(self) -> int:
        return 2 * self.n_vib * self.n_cav

    def slot_dim(self, slot: str) -> int:
        if slot not in SLOTS:
            raise ValueError(f"unknown slot {slot!r}; expected one of {SLOTS}")
        return self.dims[SLOTS.index(slot)]


@dataclass(frozen=True)
class TruncationScheme:
    """Fock-space truncation plus the guard band defining the interior block.

    The guard band is the top `guard` Fock levels of each bosonic mode.
    `guard` must leave a non-empty interior in both modes.
    """

    n_vib: int
    n_cav: int
    guard: int = GUARD_DEFAULT

    def __post_init__(self):
        if self.n_vib < 2 or self.n_cav < 2:
            raise ValueError(
                f"mode dimensions must be >= 2, got ({self.n_vib}, {self.n_cav})"
            )
        if not 0 < self.guard < min(self.n_vib, self.n_cav):
            raise ValueError(
                f"guard must satisfy 0 < guard < min(n_vib, n_cav) = "
                f"{min(self.n_vib, self.n_cav)}, got {self.guard}"
            )

    @property
    def signature(self) -> SpaceSignature:
        return SpaceSignature(self.n_vib, self.n_cav)

    @property
    def total(self) -> int:
        return self.signature.total

    def interior_mask(self) -> np.ndarray:
        """Boolean mask over the composite basis selecting the interior block."""
        vib_ok = np.arange(self.n_vib) < self.n_vib - self.guard
        cav_ok = np.arange(self.n_cav) < self.n_cav - self.guard
        qub_ok = np.ones(2, dtype=bool)
        return np.kron(np.kron(vib_ok, cav_ok), qub_ok)


def interior_block(m: np.ndarray, trunc: TruncationScheme) -> np.ndarray:
    """Interior sub-matrix (or sub-vector) of a composite-space array."""
    mask = trunc.interior_mask()
    m = np.asarray(m)
    if m.ndim == 1:
        return m[mask]
    idx = np.where(mask)[0]
    return m[np.ix_(idx, idx)]


def guard_band_resident(n: int, dim: int, guard: int = GUARD_DEFAULT) -> bool:
    """True if Fock level ``n`` of a ``dim``-level mode lies in the guard band."""
    return n >= dim - guard


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense matrix on the composite space, tagged with its signature."""

    mat: np.ndarray
    sig: SpaceSignature

    def __post_init__(self):
        n = self.sig.total
        if self.mat.shape != (n, n):
            raise ValueError(
                f"operator shape {self.mat.shape} does not match signature "
                f"dimension {n}"
            )
        if not np.all(np.isfinite(self.mat)):
            raise ValueError("operator contains non-finite entries")

    def dag(self) -> "Operator":
        return Operator(self.mat.conj().T, self.sig)

    def __matmul__(self, other: "Operator") -> "Operator":
        if self.sig != other.sig:
            raise ValueError("signature mismatch in operator product")
        return Operator(self.mat @ other.mat, self.sig)


@dataclass(frozen=True, eq=False)
class PureState:
    """Amplitude vector on the composite space.

    `norm_deficit` carries the truncation leakage accumulated while the state
    was constructed (e.g. renormalized coherent-state branches); it is
    diagnostic only and not part of the amplitudes.
    """

    vec: np.ndarray
    sig: SpaceSignature
    norm_deficit: float = 0.0

    def __post_init__(self):
        if self.vec.shape != (self.sig.total,):
            raise ValueError(
                f"state shape {self.vec.shape} does not match signature "
                f"dimension {self.sig.total}"
            )
        if not np.all(np.isfinite(self.vec)):
            raise ValueError("state contains non-finite entries")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))


def apply(op: Operator, psi: PureState) -> PureState:
    """Apply an operator to a state, propagating the norm deficit."""
    if op.sig != psi.sig:
        raise ValueError("signature mismatch between operator and state")
    return PureState(op.mat @ psi.vec, psi.sig, psi.norm_deficit)


# ---------------------------------------------------------------------------
# single-mode operators and states
# ---------------------------------------------------------------------------


def annihilation(dim: int) -> np.ndarray:
    """Bosonic lowering operator: entries (n-1, n) = sqrt(n)."""
    if dim < 2:
        raise ValueError(f"annihilation requires dim >= 2, got {dim}")
    m = np.zeros((dim, dim), dtype=complex)
    ns = np.arange(1, dim)
    m[ns - 1, ns] = np.sqrt(ns)
    return m


def number(dim: int) -> np.ndarray:
    """Number operator diag(0, 1, ..., dim-1)."""
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def position(dim: int) -> np.ndarray:
    """Dimensionless position quadrature a + a^dag."""
    a = annihilation(dim)
    return a + a.conj().T


def parity_diag(dim: int) -> np.ndarray:
    """Diagonal of the parity operator (-1)^n as a real vector."""
    return (-1.0) ** np.arange(dim)


def fock_state(dim: int, n: int) -> np.ndarray:
    """Number state |n> as a unit amplitude vector."""
    if not 0 <= n < dim:
        raise ValueError(f"Fock index {n} out of range for dimension {dim}")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return v


def coherent_amplitude_bound(dim: int, guard: int) -> float:
    """Largest |alpha|^2 accepted for states prepared in a ``dim``-level mode."""
    return (dim - guard) / 4.0


def coherent_leakage(dim: int, alpha: complex) -> float:
    """Pre-renormalization norm deficit of the truncated coherent state."""
    raw = _coherent_raw(dim, alpha)
    return float(max(0.0, 1.0 - np.sum(np.abs(raw) ** 2)))


def _coherent_raw(dim: int, alpha: complex) -> np.ndarray:
    # e^{-|a|^2/2} a^n / sqrt(n!) via a stable running product
    amps = np.empty(dim, dtype=complex)
    amps[0] = 1.0
    for n in range(1, dim):
        amps[n] = amps[n - 1] * alpha / np.sqrt(n)
    return amps * np.exp(-abs(alpha) ** 2 / 2)


def coherent_state(dim: int, alpha: complex, guard: int = GUARD_DEFAULT) -> np.ndarray:
    """Truncated coherent state |alpha>, renormalized to unit norm.

    The amplitude must satisfy |alpha|^2 <= (dim - guard)/4 so that the state
    is supported well inside the truncation; under that precondition the
    truncation leakage (see `coherent_leakage`) stays below 1e-10.  Pass
    ``guard=0`` to relax the bound to the construction-level limit dim/4 at
    the price of a larger, still reported, leakage.

    Raises
    ------
    ValueError
        If the amplitude is too large for the truncation.
    """
    if abs(alpha) ** 2 > coherent_amplitude_bound(dim, guard):
        raise ValueError(
            f"coherent amplitude |alpha|^2 = {abs(alpha)**2:.4f} exceeds the "
            f"truncation bound (dim - guard)/4 = "
            f"{coherent_amplitude_bound(dim, guard):.4f}"
        )
    raw = _coherent_raw(dim, alpha)
    return raw / np.linalg.norm(raw)


def phase_of_position(dim: int, theta: float, tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    """Unitary exp(i theta (a + a^dag)) through the spectral decomposition.

    For real theta this equals the displacement D(i theta) by a purely
    imaginary amplitude, but carries no amplitude precondition: Hamiltonian
    and transformation builders need the matrix itself, and the adequacy of
    the truncation is judged dynamically from guard-band leakage rather than
    at construction time.  At theta = 0 the identity is returned exactly.
    """
    if theta == 0:
        return np.eye(dim, dtype=complex)
    w, v = herm_eig(position(dim), tols)
    return (v * np.exp(1j * theta * w)) @ v.conj().T


def displacement(
    dim: int,
    alpha: complex,
    guard: int = GUARD_DEFAULT,
    tols: Tolerances = DEFAULT_TOLS,
) -> np.ndarray:
    """Displacement operator exp(alpha a^dag - alpha* a) on a truncated mode.

    Computed as the unit-time propagator of the Hermitian generator
    i(alpha a^dag - alpha* a), i.e. a spectral exponential, so the returned
    matrix is unitary to machine precision on the whole truncated space.
    The amplitude precondition is the same as for `coherent_state`.
    """
    if abs(alpha) ** 2 > coherent_amplitude_bound(dim, guard):
        raise ValueError(
            f"displacement amplitude |alpha|^2 = {abs(alpha)**2:.4f} exceeds "
            f"the truncation bound (dim - guard)/4 = "
            f"{coherent_amplitude_bound(dim, guard):.4f}"
        )
    a = annihilation(dim)
    gen = 1j * (alpha * a.conj().T - np.conjugate(alpha) * a)  # Hermitian
    w, v = herm_eig(gen, tols)
    return (v * np.exp(-1j * w)) @ v.conj().T


def cos_position(dim: int, eta: float, tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    """Spectral cosine of eta (a + a^dag); Hermitian, eigenvalues in [-1, 1].

    Equals (D(i eta) + D(-i eta))/2 with D the displacement operator built
    from the same truncated quadrature.  At eta = 0 the identity is returned
    exactly.
    """
    if eta < 0:
        raise ValueError(f"cos_position requires eta >= 0, got {eta}")
    if eta == 0:
        return np.eye(dim, dtype=complex)
    w, v = herm_eig(position(dim), tols)
    c = (v * np.cos(eta * w)) @ v.conj().T
    return (c + c.conj().T) / 2  # kill last-digit asymmetry


def embed(op: np.ndarray, slot: str, trunc: TruncationScheme) -> Operator:
    """Lift a single-slot matrix into the composite space.

    Kronecker product with identities on the two remaining slots, in the
    fixed (vibration, cavity, qubit) order.
    """
    sig = trunc.signature
    op = np.asarray(op, dtype=complex)
    d = sig.slot_dim(slot)
    if op.shape != (d, d):
        raise ValueError(
            f"operator shape {op.shape} does not match slot {slot!r} of "
            f"dimension {d}"
        )
    factors = [np.eye(n, dtype=complex) for n in sig.dims]
    factors[SLOTS.index(slot)] = op
    return Operator(kron(kron(factors[0], factors[1]), factors[2]), sig)


def compose(
    vib: np.ndarray, cav: np.ndarray, qubit: np.ndarray, trunc: TruncationScheme
) -> Operator:
    """Tensor product of one matrix per slot, in the fixed order."""
    sig = trunc.signature
    for m, slot in ((vib, "vib"), (cav, "cav"), (qubit, "qubit")):
        d = sig.slot_dim(slot)
        if np.asarray(m).shape != (d, d):
            raise ValueError(
                f"factor shape {np.asarray(m).shape} does not match slot "
                f"{slot!r} of dimension {d}"
            )
    return Operator(kron(kron(vib, cav), qubit), sig)


def product_state(
    vib: np.ndarray, cav: np.ndarray, qubit: np.ndarray, trunc: TruncationScheme
) -> PureState:
    """Product state of one vector per slot, in the fixed order."""
    vec = np.kron(np.kron(np.asarray(vib, dtype=complex), np.asarray(cav, dtype=complex)),
                  np.asarray(qubit, dtype=complex))
    return PureState(vec, trunc.signature)
