"""Fock basis of N bosons on three sites."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

MAX_N = 12

BONDS = ((0, 1), (1, 2))  # (1<->2), (2<->3), zero-based site indices


class FockState(NamedTuple):
    n1: int
    n2: int
    n3: int

    @property
    def total(self) -> int:
        return self.n1 + self.n2 + self.n3

    def mirrored(self) -> "FockState":
        return FockState(self.n3, self.n2, self.n1)

    def label(self) -> str:
        return f"{self.n1}_{self.n2}_{self.n3}"


@dataclass(frozen=True)
class Basis:
    """All occupation triples with n1+n2+n3 = N.

    Ordering is lexicographically descending in (n1, n2), so for N=2 the
    states run (2,0,0), (1,1,0), (1,0,1), (0,2,0), (0,1,1), (0,0,2).
    """

    N: int
    states: tuple[FockState, ...]
    index: dict[FockState, int] = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __contains__(self, s) -> bool:
        return tuple(s) in self.index

    @property
    def dim(self) -> int:
        return len(self.states)

    def position(self, s) -> int:
        try:
            return self.index[FockState(*s)]
        except (KeyError, TypeError):
            raise KeyError(f"{tuple(s)} is not a state of the N={self.N} basis") from None

    def occupations(self) -> np.ndarray:
        """(dim, 3) integer array of occupations in canonical order."""
        return np.array(self.states, dtype=np.int64).reshape(-1, 3)

    def basis_vector(self, s) -> np.ndarray:
        psi = np.zeros(self.dim, dtype=complex)
        psi[self.position(s)] = 1.0
        return psi

    def mirror_permutation(self) -> np.ndarray:
        """perm[k] = index of the site-mirrored image of state k."""
        return np.array([self.index[s.mirrored()] for s in self.states])


def build_basis(N: int) -> Basis:
    if int(N) != N or N < 1:
        raise ValueError(f"particle number must be a positive integer, got {N!r}")
    if N > MAX_N:
        raise ValueError(f"particle number {N} exceeds the supported maximum {MAX_N}")
    N = int(N)
    states = tuple(
        FockState(n1, n2, N - n1 - n2)
        for n1 in range(N, -1, -1)
        for n2 in range(N - n1, -1, -1)
    )
    return Basis(N, states, {s: k for k, s in enumerate(states)})


def _bond_index(bond) -> tuple[int, int]:
    # accepts (0,1)/(1,2) zero-based, or the 1-based labels "12"/"23"
    if bond in ("12", "1-2", 12):
        return BONDS[0]
    if bond in ("23", "2-3", 23):
        return BONDS[1]
    bond = tuple(bond)
    if bond in BONDS:
        return bond
    raise ValueError(f"unknown bond {bond!r}; expected (0, 1) or (1, 2)")


def hop_elements(basis: Basis, bond) -> list[tuple[int, int, float]]:
    """Matrix elements <row| a_i^dag a_j |col> for hops across one bond.

    Both directions are emitted, so the list is symmetric. The factor -v of
    the tunnelling term is not included.
    """
    i, j = _bond_index(bond)
    out = []
    for col, s in enumerate(basis.states):
        occ = list(s)
        # move one boson j -> i, then i -> j
        for src, dst in ((j, i), (i, j)):
            if occ[src] == 0:
                continue
            amp = math.sqrt(occ[src] * (occ[dst] + 1))
            new = occ.copy()
            new[src] -= 1
            new[dst] += 1
            out.append((basis.index[FockState(*new)], col, amp))
    return out


def number_expectations(psi, basis: Basis) -> tuple[float, float, float]:
    psi = np.asarray(psi)
    if psi.shape != (basis.dim,):
        raise ValueError(f"state has shape {psi.shape}, basis dimension is {basis.dim}")
    prob = np.abs(psi) ** 2
    n = prob @ basis.occupations()
    return float(n[0]), float(n[1]), float(n[2])
