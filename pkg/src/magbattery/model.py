"""Parameter containers and the constant single-excitation evolution matrix.

The simulated device is a chain of three bosonic modes — cavity photon (a),
magnon (b), phonon (m) — acting as the charger, with the photon mode also
coupled to a pair of identical two-level atoms that form the battery.  In the
single-excitation sector, with both atoms sharing one degenerate excited
amplitude, the conditional (no-jump) dynamics closes on four complex
amplitudes:

    C1  photon excited      |gg> (x) |100>
    C2  magnon excited      |gg> (x) |010>
    C3  phonon excited      |gg> (x) |001>
    C4  one atom excited    (|eg> and |ge> share this amplitude) (x) |000>

Moving to a rotating frame with one shift Delta_n per amplitude removes the
explicit time dependence and leaves z'(t) = -i A z(t) with a constant 4x4
matrix A built here.  Decay enters as -i*kappa/2 on the diagonal (conditional
non-Hermitian evolution), so A is not Hermitian; it is also not symmetric:
the photon->battery entry is 2*lam while battery->photon is lam, because C4
stands for two degenerate atomic excitations at once.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SystemParams",
    "Detunings",
    "FrameShifts",
    "derive_detunings",
    "derive_frame_shifts",
    "build_evolution_matrix",
]

_COUPLING_FIELDS = ("g_a", "g_b", "lam")
_DECAY_FIELDS = ("kappa_a", "kappa_b", "kappa_m", "gamma")


@dataclass(frozen=True)
class SystemParams:
    """All rates of the model, dimensionless (units of the reference coupling).

    omega_a/b/m/q are the photon, magnon, phonon and atomic transition
    frequencies; g_a couples photon-magnon, g_b magnon-phonon, lam couples the
    photon to each atom; kappa_a/b/m and gamma are the respective decay rates.
    """

    omega_a: float = 1.0
    omega_b: float = 1.0
    omega_m: float = 1.0
    omega_q: float = 1.0
    g_a: float = 1.0
    g_b: float = 1.0
    lam: float = 1.0
    kappa_a: float = 0.0
    kappa_b: float = 0.0
    kappa_m: float = 0.0
    gamma: float = 0.0

    def __post_init__(self) -> None:
        for name in dataclasses.asdict(self):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        for name in _COUPLING_FIELDS:
            if getattr(self, name) < 0:
                raise ValueError(f"coupling {name} must be >= 0")
        for name in _DECAY_FIELDS:
            if getattr(self, name) < 0:
                raise ValueError(f"decay rate {name} must be >= 0")

    @classmethod
    def from_detunings(
        cls,
        delta_1: float = 0.0,
        delta_2: float = 0.0,
        delta_3: float = 0.0,
        *,
        omega_q: float = 1.0,
        g_a: float = 1.0,
        g_b: float = 1.0,
        lam: float = 1.0,
        kappa_a: float = 0.0,
        kappa_b: float = 0.0,
        kappa_m: float = 0.0,
        gamma: float = 0.0,
    ) -> "SystemParams":
        """Build params from the three detunings instead of the four omegas.

        Only frequency differences enter the dynamics, so the absolute scale
        is gauged by omega_q (which also sets the energy unit of the battery).
        """
        omega_a = omega_q - delta_3
        omega_b = omega_a - delta_2
        omega_m = omega_b - delta_1
        return cls(
            omega_a=omega_a,
            omega_b=omega_b,
            omega_m=omega_m,
            omega_q=omega_q,
            g_a=g_a,
            g_b=g_b,
            lam=lam,
            kappa_a=kappa_a,
            kappa_b=kappa_b,
            kappa_m=kappa_m,
            gamma=gamma,
        )


@dataclass(frozen=True)
class Detunings:
    """Frequency mismatches along the chain: magnon-phonon, photon-magnon, atom-photon."""

    delta_1: float
    delta_2: float
    delta_3: float


@dataclass(frozen=True)
class FrameShifts:
    """Rotating-frame shift applied to each of the four amplitudes."""

    Delta_1: float
    Delta_2: float
    Delta_3: float
    Delta_4: float

    def as_array(self) -> np.ndarray:
        return np.array([self.Delta_1, self.Delta_2, self.Delta_3, self.Delta_4])


def derive_detunings(p: SystemParams) -> Detunings:
    """delta_1 = omega_b - omega_m, delta_2 = omega_a - omega_b, delta_3 = omega_q - omega_a."""
    return Detunings(
        delta_1=p.omega_b - p.omega_m,
        delta_2=p.omega_a - p.omega_b,
        delta_3=p.omega_q - p.omega_a,
    )


def derive_frame_shifts(d: Detunings) -> FrameShifts:
    """Shifts that remove all oscillating factors from the amplitude equations.

    They satisfy the phase-matching identities
    Delta_1 = delta_2 + Delta_2 = delta_3 + Delta_4 and
    Delta_2 = delta_1 + Delta_3, which is what makes the rotated system
    autonomous.  The overall additive gauge follows the common convention
    Delta_1 = 2*delta_3 - delta_2.
    """
    return FrameShifts(
        Delta_1=2.0 * d.delta_3 - d.delta_2,
        Delta_2=2.0 * d.delta_3 - 2.0 * d.delta_2,
        Delta_3=2.0 * d.delta_3 - 2.0 * d.delta_2 - d.delta_1,
        Delta_4=d.delta_3 - d.delta_2,
    )


def build_evolution_matrix(p: SystemParams) -> np.ndarray:
    """Constant matrix A of the rotated amplitude equations z' = -i A z.

    Basis order (Z1, Z2, Z3, Z4).  Diagonal: y_n = -(i*kappa_n/2 + Delta_n)
    with kappa = (kappa_a, kappa_b, kappa_m, gamma).  Couplings: photon-magnon
    g_a, magnon-phonon g_b, photon-battery 2*lam (forward) / lam (backward) —
    the factor 2 counts the two degenerate atomic target states.
    """
    shifts = derive_frame_shifts(derive_detunings(p)).as_array()
    rates = np.array([p.kappa_a, p.kappa_b, p.kappa_m, p.gamma])
    a = np.zeros((4, 4), dtype=complex)
    a[np.diag_indices(4)] = -(0.5j * rates + shifts)
    a[0, 1] = a[1, 0] = p.g_a
    a[1, 2] = a[2, 1] = p.g_b
    a[0, 3] = 2.0 * p.lam
    a[3, 0] = p.lam
    return a
