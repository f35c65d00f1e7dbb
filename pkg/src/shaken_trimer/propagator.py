"""Exact time evolution of the driven trimer.

The Schroedinger equation i dC/dt = H(t) C is integrated with an adaptive
Dormand-Prince 5(4) scheme. The diagonal of H(t) is known in closed form,

    Phi_a(t) = int_0^t V_a = F_a t + d_a (eps1/omega) sin(omega t),

so the integration runs on B = exp(i Phi) C, which obeys
dB/dt = -i u (K (conj(u) B)) with u = exp(i Phi) and K the hopping matrix.
This is an exact change of variables; it only removes the large,
analytically known diagonal phases that would otherwise force explicit
steps of order 1/|eps1 (n1 - n3)|. Samples are mapped back to C.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numba
import numpy as np
from scipy.linalg import expm

from .fock import Basis
from .model import ModelParams, assemble_hamiltonian, drive_coefficients, hopping_matrix, static_energies

NORM_TOL = 1e-6  # accepted deviation of the initial norm from 1
DENSE_SAMPLES_PER_PERIOD = 20  # resolves the micromotion for extrema


class IntegrationError(RuntimeError):
    """Step size underflow or another failure of the adaptive integrator."""


@dataclass
class Trajectory:
    basis: Basis
    times: np.ndarray
    states: np.ndarray  # (n_t, dim) complex amplitudes
    steps: int = 0
    rejected: int = 0

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=complex)
        if self.states.shape != (len(self.times), self.basis.dim):
            raise ValueError("states must have shape (len(times), basis dim)")

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.states) ** 2

    @property
    def populations(self) -> np.ndarray:
        return self.probabilities @ self.basis.occupations()

    @property
    def norm_drift(self) -> float:
        norms = np.sqrt(self.probabilities.sum(axis=1))
        return float(np.max(np.abs(norms - 1.0)))

    def probability(self, s) -> np.ndarray:
        return self.probabilities[:, self.basis.position(s)]

    def probability_of(self, states) -> np.ndarray:
        idx = [self.basis.position(s) for s in states]
        return self.probabilities[:, idx].sum(axis=1)

    def leakage(self, allowed) -> float:
        """Largest total probability found outside ``allowed`` at any sample."""
        allowed_idx = {self.basis.position(s) for s in allowed}
        rest = [k for k in range(self.basis.dim) if k not in allowed_idx]
        if not rest:
            return 0.0
        return float(self.probabilities[:, rest].sum(axis=1).max())

    def subset(self, mask) -> "Trajectory":
        return Trajectory(self.basis, self.times[mask], self.states[mask])


def _rhs(rows, cols, vals, F, d, x, omega, t, y, out):
    s = x * math.sin(omega * t)
    n = y.shape[0]
    u = np.empty(n, dtype=np.complex128)
    tmp = np.empty(n, dtype=np.complex128)
    for a in range(n):
        ph = F[a] * t + d[a] * s
        u[a] = complex(math.cos(ph), math.sin(ph))
        tmp[a] = u[a].conjugate() * y[a]
        out[a] = 0.0
    for k in range(rows.shape[0]):
        out[rows[k]] += vals[k] * tmp[cols[k]]
    for a in range(n):
        out[a] = -1j * u[a] * out[a]


_rhs_jit = numba.njit(cache=True)(_rhs)

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A2 = (1 / 5,)
_A3 = (3 / 40, 9 / 40)
_A4 = (44 / 45, -56 / 15, 32 / 9)
_A5 = (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729)
_A6 = (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


@numba.njit(cache=True)
def _dopri_run(rows, cols, vals, F, d, x, omega, y0, t0, targets, h_init, h_max, tol):
    n = y0.shape[0]
    nt = targets.shape[0]
    out = np.empty((nt, n), dtype=np.complex128)
    y = y0.copy()
    t = t0
    k1 = np.empty(n, dtype=np.complex128)
    k2 = np.empty(n, dtype=np.complex128)
    k3 = np.empty(n, dtype=np.complex128)
    k4 = np.empty(n, dtype=np.complex128)
    k5 = np.empty(n, dtype=np.complex128)
    k6 = np.empty(n, dtype=np.complex128)
    k7 = np.empty(n, dtype=np.complex128)
    ys = np.empty(n, dtype=np.complex128)
    ynew = np.empty(n, dtype=np.complex128)
    _rhs_jit(rows, cols, vals, F, d, x, omega, t, y, k1)
    h = h_init
    steps = 0
    rejected = 0
    for j in range(nt):
        target = targets[j]
        while t != target:
            direction = 1.0 if target > t else -1.0
            hp = min(abs(h), h_max)
            last = False
            # stretch by up to 1e-6 rather than leave a rounding-size sliver
            if hp * (1.0 + 1e-6) >= abs(target - t):
                hp = abs(target - t)
                last = True
            if hp < 1e-13 * max(1.0, abs(t)):
                return out, steps, rejected, -1
            hs = direction * hp
            for a in range(n):
                ys[a] = y[a] + hs * (_A2[0] * k1[a])
            _rhs_jit(rows, cols, vals, F, d, x, omega, t + _C[1] * hs, ys, k2)
            for a in range(n):
                ys[a] = y[a] + hs * (_A3[0] * k1[a] + _A3[1] * k2[a])
            _rhs_jit(rows, cols, vals, F, d, x, omega, t + _C[2] * hs, ys, k3)
            for a in range(n):
                ys[a] = y[a] + hs * (_A4[0] * k1[a] + _A4[1] * k2[a] + _A4[2] * k3[a])
            _rhs_jit(rows, cols, vals, F, d, x, omega, t + _C[3] * hs, ys, k4)
            for a in range(n):
                ys[a] = y[a] + hs * (_A5[0] * k1[a] + _A5[1] * k2[a] + _A5[2] * k3[a] + _A5[3] * k4[a])
            _rhs_jit(rows, cols, vals, F, d, x, omega, t + _C[4] * hs, ys, k5)
            for a in range(n):
                ys[a] = y[a] + hs * (
                    _A6[0] * k1[a] + _A6[1] * k2[a] + _A6[2] * k3[a] + _A6[3] * k4[a] + _A6[4] * k5[a]
                )
            _rhs_jit(rows, cols, vals, F, d, x, omega, t + hs, ys, k6)
            for a in range(n):
                ynew[a] = y[a] + hs * (
                    _B[0] * k1[a] + _B[2] * k3[a] + _B[3] * k4[a] + _B[4] * k5[a] + _B[5] * k6[a]
                )
            t_new = target if last else t + hs
            _rhs_jit(rows, cols, vals, F, d, x, omega, t_new, ynew, k7)
            err = 0.0
            for a in range(n):
                e = hs * (
                    _E[0] * k1[a] + _E[2] * k3[a] + _E[3] * k4[a] + _E[4] * k5[a] + _E[5] * k6[a] + _E[6] * k7[a]
                )
                ae = abs(e)
                if ae > err:
                    err = ae
            err /= tol
            if err <= 1.0:
                t = t_new
                for a in range(n):
                    y[a] = ynew[a]
                    k1[a] = k7[a]
                steps += 1
                fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
                # a step shortened to land on a sample says nothing about the next one
                if not (last and hp < abs(h)):
                    h = hp * fac
            else:
                rejected += 1
                h = hp * max(0.2, 0.9 * err ** -0.2)
        for a in range(n):
            out[j, a] = y[a]
    return out, steps, rejected, 0


@dataclass(frozen=True)
class _Generator:
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    F: np.ndarray
    d: np.ndarray
    x: float
    omega: float

    def phases(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)[:, None]
        return self.F[None, :] * t + self.d[None, :] * self.x * np.sin(self.omega * t)


def _generator(params: ModelParams, basis: Basis) -> _Generator:
    K = hopping_matrix(params, basis)
    rows, cols = np.nonzero(K)
    F = static_energies(params, basis)
    return _Generator(
        rows=rows.astype(np.int64),
        cols=cols.astype(np.int64),
        vals=K[rows, cols].astype(np.float64),
        F=F - F.mean(),  # global phase only
        d=drive_coefficients(basis),
        x=params.eps1 / params.omega,
        omega=float(params.omega),
    )


def _as_state(psi0, basis: Basis) -> np.ndarray:
    # tuples are occupations (n1, n2, n3); amplitude vectors come as arrays or lists
    if isinstance(psi0, tuple):
        psi0 = basis.basis_vector(psi0)
    psi = np.asarray(psi0, dtype=complex)
    if psi.shape != (basis.dim,):
        raise ValueError(f"initial state has shape {psi.shape}, basis dimension is {basis.dim}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"initial state is not normalised (norm {norm:.15g})")
    return psi


MAX_SAMPLES = 10_000_000


def sample_grid(t_start: float, t_end: float, sample_dt: float) -> np.ndarray:
    span = t_end - t_start
    n = int(math.floor(abs(span) / sample_dt * (1 + 1e-12) + 1e-9))
    if n + 1 > MAX_SAMPLES:
        raise ValueError(f"{n + 1} samples requested; at most {MAX_SAMPLES} are allowed")
    return t_start + math.copysign(sample_dt, span) * np.arange(n + 1)


def propagate(
    params: ModelParams,
    basis: Basis,
    psi0,
    t_end: float,
    sample_dt: float | None = None,
    tol: float = 1e-10,
    t_start: float = 0.0,
) -> Trajectory:
    """Integrate from ``t_start`` to ``t_end`` and sample every ``sample_dt``.

    ``psi0`` is the state at ``t_start``; integrating backwards (t_end <
    t_start) is allowed. Samples sit at t_start + k*sample_dt exactly, the
    integrator shortening steps to land on them. The step never exceeds a
    twentieth of the drive period, and the norm is never corrected.
    """
    if basis.N != params.N:
        raise ValueError(f"basis holds N={basis.N} particles but parameters say N={params.N}")
    if t_end == t_start:
        raise ValueError("t_end must differ from t_start")
    if sample_dt is None:
        sample_dt = params.period / 4
    if not sample_dt > 0:
        raise ValueError("sample_dt must be positive")
    if not 0 < tol <= 1e-3:
        raise ValueError("tol must lie in (0, 1e-3]")
    psi0 = _as_state(psi0, basis)

    gen = _generator(params, basis)
    times = sample_grid(t_start, t_end, sample_dt)
    ph0 = gen.phases([t_start])[0]
    b0 = np.exp(1j * ph0) * psi0
    h_max = params.period / 20
    out, steps, rejected, status = _dopri_run(
        gen.rows, gen.cols, gen.vals, gen.F, gen.d, gen.x, gen.omega,
        b0, float(t_start), times, min(h_max, 1e-3), h_max, float(tol),
    )
    if status != 0:
        raise IntegrationError("step size underflow: the problem looks stiff at this tolerance")
    states = np.exp(-1j * gen.phases(times)) * out
    return Trajectory(basis, times, states, steps=int(steps), rejected=int(rejected))


def propagate_midpoint_exponential(
    params: ModelParams,
    basis: Basis,
    psi0,
    t_end: float,
    sample_dt: float | None = None,
    substeps_per_period: int = 1000,
) -> Trajectory:
    """Independent check: products of exp(-i H(t_mid) dt) in the lab frame.

    Slow and second order; meant for small N and short times in tests.
    """
    psi = _as_state(psi0, basis).copy()
    if sample_dt is None:
        sample_dt = params.period / 4
    times = sample_grid(0.0, t_end, sample_dt)
    dt_max = params.period / substeps_per_period
    out = [psi.copy()]
    t = 0.0
    for target in times[1:]:
        n = max(1, math.ceil((target - t) / dt_max - 1e-9))
        dt = (target - t) / n
        for k in range(n):
            H = assemble_hamiltonian(params, basis, t + (k + 0.5) * dt)
            psi = expm(-1j * dt * H) @ psi
        t = target
        out.append(psi.copy())
    return Trajectory(basis, times, np.array(out))


def stroboscopic(traj: Trajectory, omega: float, rtol: float = 1e-9) -> Trajectory:
    """Restrict a trajectory to the drive-period multiples t = q 2pi/omega."""
    if not omega > 0:
        raise ValueError("omega must be positive")
    period = 2 * math.pi / omega
    t0, t1 = traj.times[0], traj.times[-1]
    q_lo = math.ceil(t0 / period - rtol)
    q_hi = math.floor(t1 / period + rtol)
    keep = []
    for q in range(q_lo, q_hi + 1):
        tq = q * period
        k = int(np.argmin(np.abs(traj.times - tq)))
        if abs(traj.times[k] - tq) > rtol * max(1.0, abs(tq)):
            raise ValueError(f"sample grid does not contain the period multiple t={tq:.6g}")
        keep.append(k)
    return traj.subset(np.array(keep, dtype=int))


def csv_header(basis: Basis) -> list[str]:
    return ["t", "n1", "n2", "n3"] + [f"P_{s.label()}" for s in basis.states]


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def trajectory_rows(traj: Trajectory) -> list[list[str]]:
    pops = traj.populations
    probs = traj.probabilities
    return [
        [_fmt(t), *map(_fmt, pops[k]), *map(_fmt, probs[k])]
        for k, t in enumerate(traj.times)
    ]


def write_trajectory_csv(traj: Trajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(csv_header(traj.basis))
        w.writerows(trajectory_rows(traj))


def read_csv_table(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array([[float(v) for v in r] for r in rows[1:]])


def write_csv_table(path, header, data) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in data:
            w.writerow([_fmt(float(v)) for v in row])
