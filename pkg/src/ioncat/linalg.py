"""Dense complex linear-algebra kernel.

Everything downstream (operator construction, propagators, fidelities) is
built on the four primitives in this module.  All functions are pure, operate
on plain complex ndarrays, and never mutate their inputs.  Matrix exponentials
are always taken through the Hermitian eigendecomposition, which keeps every
propagator unitary to machine precision at the dimensions this library
targets (a few hundred up to ~2000).

Units: hbar = 1 throughout, and frequencies are expressed in units of the
trap frequency, so time carries units of one over the trap frequency.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Hard cap on any composite dimension produced by `kron`; desk-scale guard
# against runaway tensor growth.
MAX_TOTAL_DIM = 4096


@dataclass(frozen=True)
class Tolerances:
    """Central record of every numerical tolerance used by the library.

    Attributes
    ----------
    hermiticity : float
        Max-entry deviation allowed between a matrix and its adjoint.
    eig_reconstruction : float
        Relative max-entry error allowed for V diag(w) V^dag against the
        input of the eigensolver.
    eig_unitarity : float
        Max-entry deviation of V^dag V from the identity.
    propagator_unitarity : float
        Max-entry deviation of U^dag U from the identity for spectral
        propagators.
    state_norm : float
        Allowed | ||v|| - 1 | for vectors declared normalized.
    norm_conservation : float
        Allowed norm drift of a state along a numeric evolution.
    guard_leak : float
        Allowed population of the guard band along a numeric evolution;
        exceeding it signals that the truncation is too small.  The default
        leaves headroom for the strongest intended couplings at desk-scale
        truncations (which park ~1e-7 in the cavity guard band) while
        catching genuinely under-sized runs by orders of magnitude.
    coherent_leak : float
        Allowed pre-renormalization norm deficit of a truncated coherent
        state under its amplitude precondition.
    interior_unitarity : float
        Max-entry deviation from the identity allowed on the interior block
        for constructed unitaries (dressing transformation, displacements).
    transform_identity : float
        Relative tolerance for the dressed-frame identity check.
    probability_closure : float
        Allowed deviation of a complete set of outcome probabilities from 1.
    """

    hermiticity: float = 1e-10
    eig_reconstruction: float = 1e-9
    eig_unitarity: float = 1e-10
    propagator_unitarity: float = 1e-9
    state_norm: float = 1e-10
    norm_conservation: float = 1e-8
    guard_leak: float = 1e-6
    coherent_leak: float = 1e-10
    interior_unitarity: float = 1e-8
    transform_identity: float = 1e-6
    probability_closure: float = 1e-10


DEFAULT_TOLS = Tolerances()


def max_abs(m: np.ndarray) -> float:
    """Largest absolute entry of an array (0 for an empty array)."""
    return float(np.abs(m).max()) if m.size else 0.0


def hermiticity_defect(h: np.ndarray) -> float:
    """Max-entry deviation of ``h`` from its own adjoint."""
    return max_abs(h - h.conj().T)


def unitarity_defect(u: np.ndarray) -> float:
    """Max-entry deviation of ``u^dag u`` from the identity."""
    return max_abs(u.conj().T @ u - np.eye(u.shape[1]))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two matrices, with a composite-dimension cap.

    Raises
    ------
    ValueError
        If either factor is empty or the product dimension would exceed
        ``MAX_TOTAL_DIM``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.size == 0 or b.size == 0:
        raise ValueError("kron requires non-empty matrices")
    rows = a.shape[0] * b.shape[0]
    cols = (a.shape[1] if a.ndim > 1 else 1) * (b.shape[1] if b.ndim > 1 else 1)
    if max(rows, cols) > MAX_TOTAL_DIM:
        raise ValueError(
            f"kron result dimension {rows}x{cols} exceeds MAX_TOTAL_DIM={MAX_TOTAL_DIM}"
        )
    return np.kron(a, b)


def herm_eig(
    h: np.ndarray, tols: Tolerances = DEFAULT_TOLS
) -> tuple[np.ndarray, np.ndarray]:
    """Spectral decomposition of a Hermitian matrix.

    Parameters
    ----------
    h : ndarray
        Square matrix, Hermitian within ``tols.hermiticity`` (max-entry).

    Returns
    -------
    w : ndarray
        Real eigenvalues in ascending order.
    v : ndarray
        Unitary matrix whose columns are the eigenvectors, so that
        ``h = v @ diag(w) @ v.conj().T``.

    Raises
    ------
    ValueError
        Non-square, non-finite, or non-Hermitian input.
    numpy.linalg.LinAlgError
        If the eigensolver fails to converge.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"herm_eig requires a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValueError("herm_eig input contains non-finite entries")
    defect = hermiticity_defect(h)
    if defect > tols.hermiticity:
        raise ValueError(
            f"herm_eig input is not Hermitian: max |h - h^dag| = {defect:.3e} "
            f"> {tols.hermiticity:.1e}"
        )
    w, v = np.linalg.eigh(h)
    return w, v


def propagator(h: np.ndarray, t: float, tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    """Unitary ``exp(-i h t)`` of a Hermitian generator, via `herm_eig`.

    For repeated times of the same generator, decompose once with `herm_eig`
    and recombine the phases; this convenience form decomposes on every call.
    """
    w, v = herm_eig(h, tols)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def fidelity(u: np.ndarray, v: np.ndarray, tols: Tolerances = DEFAULT_TOLS) -> float:
    """Squared overlap ``|<u|v>|^2`` of two normalized pure states.

    Insensitive to the global phase of either argument by construction.
    The result is clipped to [0, 1] to absorb last-digit roundoff.

    Raises
    ------
    ValueError
        On dimension mismatch or if either vector's norm deviates from 1
        by more than ``tols.state_norm``.
    """
    u = np.asarray(u).ravel()
    v = np.asarray(v).ravel()
    if u.shape != v.shape:
        raise ValueError(f"fidelity dimension mismatch: {u.shape} vs {v.shape}")
    for name, vec in (("first", u), ("second", v)):
        nrm = np.linalg.norm(vec)
        if abs(nrm - 1.0) > tols.state_norm:
            raise ValueError(
                f"fidelity requires normalized inputs; {name} argument has "
                f"norm {nrm:.12f}"
            )
    return float(min(1.0, abs(np.vdot(u, v)) ** 2))
