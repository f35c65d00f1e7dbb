"""Period-averaged (high-frequency) effective model.

In the frame that removes the diagonal phases, each single-hop link a -> b
carries the factor exp[-i dF t - i dd (eps1/omega) sin(omega t)], with dF the
static energy difference F_b - F_a and dd = d_b - d_a the change of n1 - n3.
When dF is an integer multiple q of omega, the one-period mean of that factor
is J_q(-dd eps1/omega), and the averaged couplings define a static Hamiltonian.
Here the mean is taken by quadrature; the closed Bessel forms for the
boundary families serve as an independent check.
"""
from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j
from .fock import BONDS, Basis, FockState, hop_elements
from .model import ModelParams, drive_coefficient, static_energy
from .propagator import DENSE_SAMPLES_PER_PERIOD, Trajectory, propagate, stroboscopic

GAP_TOL = 1e-6
IMAG_TOL = 1e-10
QUADRATURE_POINTS = 512


class OffResonanceError(ValueError):
    """A link's energy gap is not an integer number of drive quanta."""


class ApproximateModelWarning(UserWarning):
    pass


@dataclass(frozen=True)
class EffectiveHamiltonian:
    basis: Basis
    couplings: np.ndarray  # real symmetric, zero diagonal
    phase_orders: np.ndarray  # photon number q_ab per link (0 where no link)
    valid: np.ndarray  # bool, True on resonant links and on non-links
    approximate: bool = False

    def coupling(self, a, b) -> float:
        return float(self.couplings[self.basis.position(a), self.basis.position(b)])

    def to_csv(self, path) -> None:
        header = ["state"] + [s.label() for s in self.basis.states]
        with open(path, "w") as fh:
            fh.write(",".join(header) + "\n")
            for s, row in zip(self.basis.states, self.couplings):
                fh.write(",".join([s.label()] + [f"{v:.12g}" for v in row]) + "\n")


@dataclass(frozen=True)
class SubspaceReduction:
    states: tuple[FockState, ...]
    couplings: np.ndarray

    def __contains__(self, s) -> bool:
        return FockState(*s) in self.states

    def as_set(self) -> frozenset[FockState]:
        return frozenset(self.states)


def _bare_coupling(params: ModelParams, a, b) -> float:
    a, b = tuple(a), tuple(b)
    diff = [y - x for x, y in zip(a, b)]
    # single hop across bond (0,1) or (1,2): one +1, one -1, adjacent sites
    for i, j in BONDS:
        for src, dst in ((i, j), (j, i)):
            expect = [0, 0, 0]
            expect[src], expect[dst] = -1, 1
            if diff == expect:
                return -params.v * math.sqrt(a[src] * (a[dst] + 1))
    raise ValueError(f"{a} and {b} are not connected by a single hop")


def link_gap(params: ModelParams, a, b) -> tuple[float, int]:
    """Static energy gap F_b - F_a and the change of the drive coefficient."""
    return static_energy(params, b) - static_energy(params, a), drive_coefficient(b) - drive_coefficient(a)


def period_average(gap: float, dd: int, x: float, omega: float, points: int = QUADRATURE_POINTS) -> complex:
    """(1/T) int_0^T exp[-i gap t - i dd x sin(omega t)] dt by the trapezoid rule.

    For gap = q omega the integrand is periodic and the rule converges
    geometrically; it is checked against twice the number of points.
    """
    def trap(n):
        theta = 2 * math.pi * np.arange(n) / n
        return np.mean(np.exp(-1j * (gap / omega) * theta - 1j * dd * x * np.sin(theta)))

    coarse, fine = trap(points), trap(2 * points)
    if abs(coarse - fine) > 1e-12:
        raise ArithmeticError(f"period average not converged ({abs(coarse - fine):.2e})")
    return complex(fine)


def _photon_order(params: ModelParams, gap: float) -> int | None:
    q = gap / params.omega
    k = round(q)
    return int(k) if abs(q - k) <= GAP_TOL else None


def averaged_coupling(params: ModelParams, a, b) -> float:
    bare = _bare_coupling(params, a, b)
    gap, dd = link_gap(params, a, b)
    if _photon_order(params, gap) is None:
        raise OffResonanceError(
            f"link {tuple(a)} -> {tuple(b)}: gap {gap:g} is not an integer multiple of omega={params.omega:g}"
        )
    avg = period_average(gap, dd, params.eps1 / params.omega, params.omega)
    if abs(avg.imag) > IMAG_TOL:
        raise ArithmeticError(f"averaged coupling has imaginary part {avg.imag:.3e}")
    return bare * avg.real


def _kappa(params: ModelParams, n: int) -> float:
    return -params.v * math.sqrt((n + 1) * (params.N - n))


def _nu(params: ModelParams, n: int) -> float:
    return -params.v * math.sqrt(n)


def closed_form_coupling(params: ModelParams, a, b) -> float:
    """Bessel-factor expression for links touching an edge-empty state.

    Covers every link incident to a state with n3 = 0 or n1 = 0. Other links
    have no tabulated form; use :func:`averaged_coupling` for them.
    """
    a, b = FockState(*a), FockState(*b)
    N = params.N
    m = round(params.eps0 / params.omega)
    x = params.eps1 / params.omega
    _bare_coupling(params, a, b)  # adjacency check

    for row, col in ((a, b), (b, a)):
        n1, n2, n3 = row
        if n3 == 0:
            n = n2
            if col == (n1 - 1, n2 + 1, 0):
                return _kappa(params, n) * bessel_j(-(N - 2 * n - 1) - m, x)
            if col == (n1 + 1, n2 - 1, 0):
                return _kappa(params, n - 1) * bessel_j(-(N - 2 * n + 1) - m, x)
            if col == (n1, n2 - 1, 1):
                return _nu(params, n) * bessel_j(-(N - 1) - m, x)
        if n1 == 0:
            n = n2
            if col == (0, n2 + 1, n3 - 1):
                return _kappa(params, n) * bessel_j((N - 2 * n - 1) - m, x)
            if col == (0, n2 - 1, n3 + 1):
                return _kappa(params, n - 1) * bessel_j((N - 2 * n + 1) - m, x)
            if col == (1, n2 - 1, n3):
                return _nu(params, n) * bessel_j((N - 1) - m, x)
    raise ValueError(f"no closed form for the interior link {a} <-> {b}")


def build_effective_hamiltonian(
    params: ModelParams, basis: Basis, drop_detuned: bool = False
) -> EffectiveHamiltonian:
    """Average every single-hop link of the basis.

    Off-resonant links raise :class:`OffResonanceError` unless
    ``drop_detuned`` is set, in which case they are zeroed and the result is
    flagged approximate.
    """
    if basis.N != params.N:
        raise ValueError(f"basis holds N={basis.N} particles but parameters say N={params.N}")
    dim = basis.dim
    C = np.zeros((dim, dim))
    orders = np.zeros((dim, dim), dtype=int)
    valid = np.ones((dim, dim), dtype=bool)
    x = params.eps1 / params.omega
    for bond in BONDS:
        for row, col, amp in hop_elements(basis, bond):
            if row > col:
                continue
            a, b = basis.states[row], basis.states[col]
            gap, dd = link_gap(params, a, b)
            q = _photon_order(params, gap)
            if q is None:
                if not drop_detuned:
                    raise OffResonanceError(
                        "effective model undefined off resonance: "
                        f"link {a} <-> {b} has gap {gap / params.omega:.6g} omega"
                    )
                valid[row, col] = valid[col, row] = False
                continue
            avg = period_average(gap, dd, x, params.omega)
            if abs(avg.imag) > IMAG_TOL:
                raise ArithmeticError(f"averaged coupling has imaginary part {avg.imag:.3e}")
            C[row, col] = C[col, row] = -params.v * amp * avg.real
            orders[row, col], orders[col, row] = q, -q
    approximate = not valid.all()
    if approximate:
        warnings.warn("detuned links dropped; effective model is approximate", ApproximateModelWarning)
    return EffectiveHamiltonian(basis, C, orders, valid, approximate)


def reachable_subspace(effH: EffectiveHamiltonian, start, threshold: float = 1e-10) -> SubspaceReduction:
    basis = effH.basis
    k0 = basis.position(start)
    strong = np.abs(effH.couplings) > threshold
    seen = {k0}
    queue = deque([k0])
    while queue:
        k = queue.popleft()
        for j in np.nonzero(strong[k])[0]:
            if j not in seen:
                seen.add(int(j))
                queue.append(int(j))
    idx = sorted(seen)
    return SubspaceReduction(
        tuple(basis.states[k] for k in idx),
        effH.couplings[np.ix_(idx, idx)].copy(),
    )


def propagate_effective(effH: EffectiveHamiltonian, psi0, t_grid) -> Trajectory:
    basis = effH.basis
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (basis.dim,):
        raise ValueError(f"initial state has shape {psi0.shape}, basis dimension is {basis.dim}")
    if abs(np.linalg.norm(psi0) - 1) > 1e-10:
        raise ValueError("initial state is not normalised")
    t = np.asarray(t_grid, dtype=float)
    E, V = np.linalg.eigh(effH.couplings)
    c0 = V.T @ psi0
    states = (np.exp(-1j * np.outer(t, E)) * c0) @ V.T
    return Trajectory(basis, t, states)


def slowest_period(sub: SubspaceReduction, floor: float = 1e-9) -> float | None:
    """Longest beat period 2 pi / |E_i - E_j| inside a reduced subspace."""
    if len(sub.states) < 2:
        return None
    E = np.linalg.eigvalsh(sub.couplings)
    gaps = np.abs(E[:, None] - E[None, :])
    gaps = gaps[gaps > floor]
    if gaps.size == 0:
        return None
    return float(2 * math.pi / gaps.min())


@dataclass
class Comparison:
    times: np.ndarray
    full: np.ndarray  # (n_t, 3) occupations from the exact propagator
    averaged: np.ndarray  # (n_t, 3) occupations from the effective model
    norm_drift: float
    approximate: bool

    @property
    def max_discrepancy(self) -> float:
        return float(np.max(np.abs(self.full - self.averaged)))

    def table(self) -> tuple[list[str], np.ndarray]:
        header = ["t", "n1_full", "n2_full", "n3_full", "n1_eff", "n2_eff", "n3_eff"]
        return header, np.column_stack([self.times, self.full, self.averaged])


def compare_stroboscopic(
    params: ModelParams,
    basis: Basis,
    psi0,
    t_end: float,
    tol: float = 1e-10,
    drop_detuned: bool = False,
    samples_per_period: int = DENSE_SAMPLES_PER_PERIOD,
) -> Comparison:
    """Exact and averaged well occupations at t = 0, T, 2T, ... up to t_end."""
    effH = build_effective_hamiltonian(params, basis, drop_detuned)
    full = stroboscopic(propagate(params, basis, psi0, t_end, params.period / samples_per_period, tol), params.omega)
    eff = propagate_effective(effH, full.states[0], full.times)
    return Comparison(full.times, full.populations, eff.populations, full.norm_drift, effH.approximate)
