"""Driven three-site Bose-Hubbard model with nearest and next-nearest interactions.

H = -v sum_j (a_{j+1}^dag a_j + h.c.)
    + U0/2 sum_j n_j(n_j-1) + U1 (n1 n2 + n2 n3) + U2 n1 n3
    + (eps0 + eps1 cos(omega t)) (n1 - n3)

Units are natural (hbar = 1); energies are usually quoted in units of v.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .fock import BONDS, Basis, hop_elements

PARAM_KEYS = ("v", "U0", "U1", "U2", "eps0", "eps1", "omega", "N")


@dataclass(frozen=True)
class ModelParams:
    v: float
    U0: float
    U1: float
    U2: float
    eps0: float
    eps1: float
    omega: float
    N: int

    def __post_init__(self):
        if not self.v > 0:
            raise ValueError(f"hopping v must be positive, got {self.v}")
        if not self.omega > 0:
            raise ValueError(f"drive frequency omega must be positive, got {self.omega}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        object.__setattr__(self, "N", int(self.N))

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        missing = [k for k in PARAM_KEYS if k not in d]
        if missing:
            raise KeyError(f"missing model parameter(s): {', '.join(missing)}")
        return cls(**{k: d[k] for k in PARAM_KEYS})

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega

    def with_drive(self, eps0: float, eps1: float) -> "ModelParams":
        return replace(self, eps0=eps0, eps1=eps1)

    def mirrored(self) -> "ModelParams":
        """Parameters whose Hamiltonian is the site-mirror image of this one."""
        return replace(self, eps0=-self.eps0, eps1=-self.eps1)


@dataclass(frozen=True)
class ResonanceReport:
    delta_a: float
    delta_b: float
    beta: float
    m_ratio: float
    m: int
    is_resonant: bool
    delta_e1: float
    k_ratio: float


def drive_coefficient(s) -> int:
    return s[0] - s[2]


def interaction_energy(p: ModelParams, s) -> float:
    n1, n2, n3 = s
    return (
        0.5 * p.U0 * (n1 * (n1 - 1) + n2 * (n2 - 1) + n3 * (n3 - 1))
        + p.U1 * (n1 * n2 + n2 * n3)
        + p.U2 * n1 * n3
    )


def static_energy(p: ModelParams, s) -> float:
    """Time-independent part of the diagonal: interactions plus static tilt."""
    return interaction_energy(p, s) + p.eps0 * drive_coefficient(s)


def diagonal_energy(p: ModelParams, s, t: float) -> float:
    if sum(s) != p.N:
        raise ValueError(f"state {tuple(s)} does not hold N={p.N} particles")
    return static_energy(p, s) + p.eps1 * math.cos(p.omega * t) * drive_coefficient(s)


def _check_basis(p: ModelParams, basis: Basis):
    if basis.N != p.N:
        raise ValueError(f"basis holds N={basis.N} particles but parameters say N={p.N}")


def static_energies(p: ModelParams, basis: Basis) -> np.ndarray:
    _check_basis(p, basis)
    return np.array([static_energy(p, s) for s in basis.states])


def drive_coefficients(basis: Basis) -> np.ndarray:
    return np.array([drive_coefficient(s) for s in basis.states], dtype=float)


def hopping_matrix(p: ModelParams, basis: Basis) -> np.ndarray:
    """Real symmetric tunnelling part, -v times the hop amplitudes."""
    _check_basis(p, basis)
    K = np.zeros((basis.dim, basis.dim))
    for bond in BONDS:
        for row, col, amp in hop_elements(basis, bond):
            K[row, col] = -p.v * amp
    return K


def assemble_hamiltonian(p: ModelParams, basis: Basis, t: float) -> np.ndarray:
    H = hopping_matrix(p, basis).astype(complex)
    diag = static_energies(p, basis) + p.eps1 * math.cos(p.omega * t) * drive_coefficients(basis)
    H[np.diag_indices(basis.dim)] = diag
    return H


def energy_gap(p: ModelParams) -> float:
    """Energy released when |N-i,i,0> -> |N-i,i-1,1> on resonance."""
    return p.N * (p.U1 - p.U2) - (p.U0 - p.U1) + p.eps0


def check_resonance(p: ModelParams, tol: float = 1e-9) -> ResonanceReport:
    """Compare the interaction ladder and static tilt to the drive frequency.

    ``tol`` is relative to omega for the interaction differences and absolute
    for eps0/omega.
    """
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    da = p.U0 - p.U1
    db = p.U1 - p.U2
    m_ratio = p.eps0 / p.omega
    m = int(round(m_ratio))
    de1 = energy_gap(p)
    resonant = (
        abs(da - p.omega) <= tol * p.omega
        and abs(db - p.omega) <= tol * p.omega
        and abs(m_ratio - m) <= tol
    )
    return ResonanceReport(
        delta_a=da,
        delta_b=db,
        beta=da - db,
        m_ratio=m_ratio,
        m=m,
        is_resonant=bool(resonant),
        delta_e1=de1,
        k_ratio=de1 / p.omega,
    )


# Resonant ladder U0-U1 = U1-U2 = omega = 35 v, four bosons, drive switched off.
BASE_PARAMS = ModelParams(v=1.0, U0=75.0, U1=40.0, U2=5.0, eps0=0.0, eps1=0.0, omega=35.0, N=4)
