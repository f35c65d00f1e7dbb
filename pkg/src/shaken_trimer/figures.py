"""Baked-in figure configurations and their pass/fail checks.

Every panel shares v=1, U0=75, U1=40, omega=35 and N=4; the panels differ in
the static tilt, the drive amplitude, the initial state and (panel 3) U2.
The table below is the single source used by the CLI, the scripts and the
acceptance tests.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .fock import FockState, build_basis
from .model import ModelParams
from .propagator import DENSE_SAMPLES_PER_PERIOD, Trajectory, propagate

OMEGA = 35.0
FIGURE_T_END = 100.0
NORM_DRIFT_LIMIT = 1e-8


class Check(NamedTuple):
    name: str
    value: float
    passed: bool

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  (value {self.value:.6g})"


@dataclass(frozen=True)
class FigurePanel:
    fig_id: str
    eps0_over_omega: int
    eps1_over_omega: float
    initial: FockState
    checks: Callable[[Trajectory], list[Check]]
    U2: float = 5.0

    def params(self) -> ModelParams:
        return ModelParams(
            v=1.0, U0=75.0, U1=40.0, U2=self.U2,
            eps0=self.eps0_over_omega * OMEGA, eps1=self.eps1_over_omega * OMEGA,
            omega=OMEGA, N=4,
        )

    def run(self, t_end: float = FIGURE_T_END, tol: float = 1e-10, sample_dt: float | None = None) -> Trajectory:
        p = self.params()
        basis = build_basis(p.N)
        if sample_dt is None:
            sample_dt = p.period / DENSE_SAMPLES_PER_PERIOD
        return propagate(p, basis, basis.basis_vector(self.initial), t_end, sample_dt, tol)

    def evaluate(self, traj: Trajectory) -> list[Check]:
        drift = traj.norm_drift
        return self.checks(traj) + [Check(f"norm drift < {NORM_DRIFT_LIMIT:g}", drift, drift < NORM_DRIFT_LIMIT)]


def _within(name, value, lo, hi) -> Check:
    return Check(f"{name} in [{lo}, {hi}]", float(value), bool(lo <= value <= hi))


def _below(name, value, limit) -> Check:
    return Check(f"{name} < {limit}", float(value), bool(value < limit))


def _above(name, value, limit) -> Check:
    return Check(f"{name} > {limit}", float(value), bool(value > limit))


def _frozen(traj):
    dev = np.max(np.abs(traj.populations - traj.populations[0]), axis=0)
    return [_below(f"max |<n{i + 1}>(t) - <n{i + 1}>(0)|", dev[i], 0.05) for i in range(3)]


def _one_moves_out_of_left(traj):
    n1, n3 = traj.populations[:, 0], traj.populations[:, 2]
    return [
        _within("min <n1>", n1.min(), 1.95, 2.10),
        _within("max <n1>", n1.max(), 2.95, 3.0),
        _below("max <n3>", n3.max(), 0.05),
    ]


def _two_move_out_of_left(traj):
    n1, n3 = traj.populations[:, 0], traj.populations[:, 2]
    return [_within("min <n1>", n1.min(), 0.95, 1.15), _below("max <n3>", n3.max(), 0.05)]


def _pair_checks(traj, p_move, leak_each=None, leak_total=None):
    pair = (FockState(0, 4, 0), FockState(0, 3, 1))
    out = [_above("max P_0_3_1", traj.probability(pair[1]).max(), p_move)]
    if leak_each is not None:
        others = [k for k, s in enumerate(traj.basis.states) if s not in pair]
        worst = traj.probabilities[:, others].max()
        out.append(_below("max P outside {0_4_0, 0_3_1}", worst, leak_each))
    if leak_total is not None:
        out.append(_below("leakage outside {0_4_0, 0_3_1}", traj.leakage(pair), leak_total))
    return out


def _ladder(traj, states, limit=0.95):
    total = traj.probability_of(states).min()
    return [_above("min sum " + "+".join("P_" + s.label() for s in states), total, limit)]


FIGURES: dict[str, FigurePanel] = {
    "1a": FigurePanel("1a", -2, 3.8317, FockState(3, 1, 0), _frozen),
    "1b": FigurePanel("1b", -1, 5.1356, FockState(3, 1, 0), _one_moves_out_of_left),
    "1c": FigurePanel("1c", 0, 6.3802, FockState(3, 1, 0), _two_move_out_of_left),
    "2a": FigurePanel("2a", 1, 5.1356, FockState(0, 4, 0), lambda tr: _pair_checks(tr, 0.9, leak_each=0.05)),
    "2b": FigurePanel(
        "2b", 2, 7.0156, FockState(0, 4, 0),
        lambda tr: _ladder(tr, [FockState(0, 4, 0), FockState(0, 3, 1), FockState(0, 2, 2)]),
    ),
    "2c": FigurePanel(
        "2c", -1, 7.5883, FockState(0, 4, 0),
        lambda tr: _ladder(tr, [FockState(0, 4 - n, n) for n in range(4)]),
    ),
    "3": FigurePanel("3", 1, 5.1356, FockState(0, 4, 0), lambda tr: _pair_checks(tr, 0.8, leak_total=0.1), U2=10.0),
}

# panels whose drive sits on the photon-assisted resonance (panel 3 is detuned)
RESONANT_FIGURES = ("1a", "1b", "1c", "2a", "2b", "2c")


def figure(fig_id: str) -> FigurePanel:
    try:
        return FIGURES[fig_id]
    except KeyError:
        raise KeyError(f"unknown figure id {fig_id!r}; choose from {', '.join(FIGURES)}") from None

