"""Hamiltonians of the ion-cavity system and the displaced-frame dressing.

The full Hamiltonian (hbar = 1, frequencies in units of the trap frequency)
couples the ion's internal transition to the cavity quadrature, with the
motional recoil entering through the displacement phase exp(+-i eta (a+a^dag))
attached to the raising/lowering operators:

    H = nu a^dag a + omega b^dag b + (omega0/2) sigma_z
        + g (b^dag + b) [ e^{i eta (a+a^dag)} sigma_+ + e^{-i eta (a+a^dag)} sigma_- ]

At eta = 0 the recoil phases are exactly the identity and the coupling
reduces to g (sigma_+ + sigma_-)(b^dag + b).  This displaced form of the
recoil factor is the one the dressing transformation `build_t` diagonalizes
*exactly at every eta* (no Lamb-Dicke expansion); a bare cosine factor
cos(eta (a+a^dag)) multiplying sigma_x would be dressed into
cos^2 sigma_z + sin*cos sigma_y instead and the frame identity would
acquire O(g) residuals.

The dressing T is built from displacements D = D(i eta / 2):

    T = (1/sqrt2) { (D^dag + D)/2 + (D^dag - D)/2 sigma_z
                    + D sigma_+ - D^dag sigma_- }

and maps H to a frame where the motional coupling is a linear drive:

    T H T^dag = nu a^dag a + omega b^dag b + g (b^dag + b) sigma_z
                - i (eta nu / 2)(a^dag - a) sigma_x - (omega0/2) sigma_x
                + nu eta^2 / 4

which is assembled term by term by `build_h_transformed` (the bracketed form
with the removable eta-singularity is expanded, so eta = 0 is regular).
Dropping the g (b^dag + b) sigma_z term gives the weak-coupling model of
`build_h_regime`, valid when eta * nu >> g; `regime_report` quantifies that
condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .linalg import DEFAULT_TOLS, Tolerances
from .spaces import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Z,
    Operator,
    TruncationScheme,
    annihilation,
    compose,
    number,
    phase_of_position,
)

# Default thresholds for the regime flags; configuration, not physics claims.
DRIVE_RATIO_THRESHOLD = 50.0
LAMB_DICKE_THRESHOLD = 0.3


@dataclass(frozen=True)
class SystemParams:
    """Physical frequencies and couplings, in units of the trap frequency.

    Attributes
    ----------
    nu : float
        Vibrational (trap) frequency; 1 by convention.
    omega : float
        Cavity mode frequency.
    omega0 : float
        Atomic transition frequency.
    g : float
        Ion-field coupling constant.
    eta : float
        Lamb-Dicke parameter (dimensionless); a direct input here.
    """

    nu: float = 1.0
    omega: float = 1.0
    omega0: float = 0.2
    g: float = 0.005
    eta: float = 0.5

    def __post_init__(self):
        if self.nu <= 0:
            raise ValueError(f"nu must be positive, got {self.nu}")
        for name in ("omega", "omega0", "g", "eta"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")

    @property
    def beta(self) -> complex:
        """Displacement amplitude i eta / 2 of the dressing; always derived."""
        return 0.5j * self.eta


@dataclass(frozen=True)
class RegimeReport:
    """Ratios and flags diagnosing the weak-coupling, beyond-Lamb-Dicke regime."""

    ratio_drive: float          # eta * nu / g (inf at g = 0)
    ratio_ld: float             # eta itself
    regime_ok: bool             # ratio_drive >= drive_threshold
    beyond_ld: bool             # eta >= ld_threshold
    drive_threshold: float
    ld_threshold: float


def regime_report(
    p: SystemParams,
    drive_threshold: float = DRIVE_RATIO_THRESHOLD,
    ld_threshold: float = LAMB_DICKE_THRESHOLD,
) -> RegimeReport:
    """Evaluate the drive-to-coupling ratio and the Lamb-Dicke flag."""
    ratio = math.inf if p.g == 0 else p.eta * p.nu / p.g
    return RegimeReport(
        ratio_drive=ratio,
        ratio_ld=p.eta,
        regime_ok=ratio >= drive_threshold,
        beyond_ld=p.eta >= ld_threshold,
        drive_threshold=drive_threshold,
        ld_threshold=ld_threshold,
    )


def build_h_full(
    p: SystemParams, trunc: TruncationScheme, tols: Tolerances = DEFAULT_TOLS
) -> Operator:
    """Full ion-cavity Hamiltonian on the truncated composite space.

    Hermitian by construction (the coupling is assembled as M + M^dag).
    """
    nv, nc = trunc.n_vib, trunc.n_cav
    iv = np.eye(nv, dtype=complex)
    ic = np.eye(nc, dtype=complex)
    iq = np.eye(2, dtype=complex)
    b = annihilation(nc)
    x_cav = b + b.conj().T

    h = (
        p.nu * compose(number(nv), ic, iq, trunc).mat
        + p.omega * compose(iv, number(nc), iq, trunc).mat
        + 0.5 * p.omega0 * compose(iv, ic, SIGMA_Z, trunc).mat
    )
    recoil = phase_of_position(nv, p.eta, tols)  # exp(i eta (a + a^dag))
    m = p.g * compose(recoil, x_cav, SIGMA_PLUS, trunc).mat
    h = h + m + m.conj().T
    return Operator(h, trunc.signature)


def build_t(
    p: SystemParams, trunc: TruncationScheme, tols: Tolerances = DEFAULT_TOLS
) -> Operator:
    """Displacement-dressed qubit rotation that diagonalizes the coupling.

    Unitary on the whole truncated space (it is assembled from spectral
    displacement exponentials); the frame identity it generates is faithful
    only on the interior block.  At eta = 0 the qubit factor reduces to
    (1/sqrt2) [[1, 1], [-1, 1]].
    """
    nv, nc = trunc.n_vib, trunc.n_cav
    ic = np.eye(nc, dtype=complex)
    d = phase_of_position(nv, p.eta / 2, tols)  # D(i eta / 2)
    dd = d.conj().T
    iq = np.eye(2, dtype=complex)
    t = (
        0.5 * compose(dd + d, ic, iq, trunc).mat
        + 0.5 * compose(dd - d, ic, SIGMA_Z, trunc).mat
        + compose(d, ic, SIGMA_PLUS, trunc).mat
        - compose(dd, ic, SIGMA_MINUS, trunc).mat
    ) / np.sqrt(2)
    return Operator(t, trunc.signature)


def build_h_transformed(
    p: SystemParams, trunc: TruncationScheme, tols: Tolerances = DEFAULT_TOLS
) -> Operator:
    """Dressed-frame Hamiltonian, assembled term by term.

    The drive bracket is expanded as
    -i (eta nu / 2)(a^dag - a) sigma_x - (omega0 / 2) sigma_x, which is
    finite for every eta including eta = 0, and the constant energy shift
    nu eta^2 / 4 enters as a multiple of the identity.
    """
    del tols  # same interface as the other builders; nothing spectral here
    nv, nc = trunc.n_vib, trunc.n_cav
    iv = np.eye(nv, dtype=complex)
    ic = np.eye(nc, dtype=complex)
    iq = np.eye(2, dtype=complex)
    a = annihilation(nv)
    b = annihilation(nc)
    x_cav = b + b.conj().T

    h = (
        p.nu * compose(number(nv), ic, iq, trunc).mat
        + p.omega * compose(iv, number(nc), iq, trunc).mat
        + p.g * compose(iv, x_cav, SIGMA_Z, trunc).mat
        - 1j * (p.eta * p.nu / 2) * compose(a.conj().T - a, ic, SIGMA_X, trunc).mat
        - 0.5 * p.omega0 * compose(iv, ic, SIGMA_X, trunc).mat
        + (p.nu * p.eta**2 / 4) * np.eye(trunc.total, dtype=complex)
    )
    return Operator(h, trunc.signature)


def build_h_regime(
    p: SystemParams, trunc: TruncationScheme, tols: Tolerances = DEFAULT_TOLS
) -> Operator:
    """Weak-coupling model: the dressed frame with the cavity coupling dropped.

    Exactly `build_h_transformed` with g forced to zero; cavity free
    evolution is retained, so the cavity vacuum is invariant under it.
    """
    return build_h_transformed(replace(p, g=0.0), trunc, tols)
