"""Drive parameters that move a prescribed number of bosons.

Two families of plans:

* centre transport, all N bosons start in the middle well |0,N,0>. Moving
  k = N - i of them to the left (right) well needs J_{i-1}(eps1/omega) = 0
  and eps0 = -(N-i) omega (+(N-i) omega). For k = N-1 the alternative rule
  J_{N}(eps1/omega) = 0 with the smallest admissible |m| is used.
* edge transport from |N-1,1,0> (|0,1,N-1>): moving k = i-1 bosons into the
  centre needs J_i(eps1/omega) = 0 and eps0 = -(N-i-1) omega (+ for the right).

Each plan is cross-checked on the averaged model: the component of the
coupling graph containing the initial state must be exactly the predicted
ladder, and its weakest link should dominate the second-order scale
max(kappa^2)/omega. Otherwise the next Bessel zero is tried; if none
dominates, the zero with the strongest weakest link is used.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .bessel import MAX_ZERO_INDEX, bessel_zero
from .effective import build_effective_hamiltonian, reachable_subspace, slowest_period
from .fock import FockState, build_basis
from .model import ModelParams
from .propagator import DENSE_SAMPLES_PER_PERIOD, Trajectory, propagate

PATHWAYS = ("center->left", "center->right", "left->center", "right->center")

# source well (0-based) whose occupation change counts the transported bosons
SOURCE_SITE = {"center->left": 1, "center->right": 1, "left->center": 0, "right->center": 2}
_MIRROR = {
    "center->left": "center->right",
    "center->right": "center->left",
    "left->center": "right->center",
    "right->center": "left->center",
}

LINK_FLOOR = 1e-9  # couplings below this (units of v) count as switched off
DEFAULT_OMEGA_OVER_V = 35.0
MIN_DOMINANCE = 1.5
FROZEN_T_END = 100.0  # units of 1/v, used when the plan predicts no motion
COUNT_GUARD = 0.25


class PlanningError(ValueError):
    pass


@dataclass(frozen=True)
class TunnelingPlan:
    N: int
    pathway: str
    transport_count: int
    i: int
    rule: str  # "centre", "centre-alt" or "edge"
    bessel_order: int
    zero_index: int
    eps1_over_omega: float
    eps0_over_omega: int
    initial_state: FockState
    predicted_final_states: tuple[FockState, ...]
    requested_zero_index: int = 1
    effective_period: float | None = None  # slowest beat in units of 1/v

    def drive(self, omega: float) -> tuple[float, float]:
        return self.eps0_over_omega * omega, self.eps1_over_omega * omega

    def params(self, base: ModelParams) -> ModelParams:
        if base.N != self.N:
            raise PlanningError(f"plan is for N={self.N}, parameters have N={base.N}")
        return base.with_drive(*self.drive(base.omega))

    def mirrored(self) -> "TunnelingPlan":
        """Same plan with wells 1 and 3 exchanged (eps0 -> -eps0).

        The exact mirror image of the driven Hamiltonian also needs
        eps1 -> -eps1, a half-period shift; see :func:`mirror_discrepancy`.
        """
        return TunnelingPlan(
            N=self.N,
            pathway=_MIRROR[self.pathway],
            transport_count=self.transport_count,
            i=self.i,
            rule=self.rule,
            bessel_order=self.bessel_order,
            zero_index=self.zero_index,
            eps1_over_omega=self.eps1_over_omega,
            eps0_over_omega=-self.eps0_over_omega,
            initial_state=self.initial_state.mirrored(),
            predicted_final_states=tuple(s.mirrored() for s in self.predicted_final_states),
            requested_zero_index=self.requested_zero_index,
            effective_period=self.effective_period,
        )

    def default_t_end(self, v: float = 1.0) -> float:
        if self.effective_period is None:
            return FROZEN_T_END / v
        return 3.0 * self.effective_period / v

    def to_dict(self) -> dict:
        d = asdict(self)
        d["initial_state"] = list(self.initial_state)
        d["predicted_final_states"] = [list(s) for s in self.predicted_final_states]
        d["m"] = d.pop("eps0_over_omega")
        d["s"] = d.pop("zero_index")
        d["count"] = d.pop("transport_count")
        return d


def _reference_params(N: int, m: int, x: float, omega_over_v: float) -> ModelParams:
    # on resonance the averaged couplings depend only on v, N, m and eps1/omega
    w = omega_over_v
    return ModelParams(v=1.0, U0=2 * w, U1=w, U2=0.0, eps0=m * w, eps1=x * w, omega=w, N=N)


def _second_order_scale(N: int, omega_over_v: float) -> float:
    return max((n + 1) * (N - n) for n in range(N)) / omega_over_v


def _select_zero(N, order, m, initial, predicted, s, omega_over_v, min_dominance):
    basis = build_basis(N)
    scale = _second_order_scale(N, omega_over_v)
    target = frozenset(predicted)
    best = None  # (weakest link, s, x, period) among zeros that isolate the ladder
    for s_try in range(s, MAX_ZERO_INDEX + 1):
        x = bessel_zero(order, s_try)
        effH = build_effective_hamiltonian(_reference_params(N, m, x, omega_over_v), basis)
        sub = reachable_subspace(effH, initial, LINK_FLOOR)
        if sub.as_set() != target:
            continue
        live = np.abs(sub.couplings)
        live = live[live > LINK_FLOOR]
        weakest = live.min() if live.size else math.inf
        if weakest >= min_dominance * scale:
            return s_try, x, slowest_period(sub)
        if best is None or weakest > best[0]:
            best = (weakest, s_try, x, slowest_period(sub))
    if best is not None:
        # no zero clears the dominance margin (larger N); keep the most robust one
        return best[1:]
    raise PlanningError(
        f"no zero of J_{order} with index {s}..{MAX_ZERO_INDEX} isolates the predicted states"
    )


def _direction_sign(direction: str) -> int:
    if direction not in ("left", "right"):
        raise PlanningError(f"direction must be 'left' or 'right', got {direction!r}")
    return -1 if direction == "left" else 1


def plan_center_transport(
    N: int,
    count: int,
    direction: str,
    s: int = 1,
    omega_over_v: float = DEFAULT_OMEGA_OVER_V,
    min_dominance: float = MIN_DOMINANCE,
) -> TunnelingPlan:
    """Move ``count`` bosons out of the full centre well towards ``direction``."""
    sign = _direction_sign(direction)
    if count < 0:
        raise PlanningError("count must be non-negative")
    if count >= N:
        raise PlanningError(f"count must be ≤ N−1 (= {N - 1}), got {count}")
    i = N - count
    if count <= N - 2 or N == 1:
        rule, order, m = "centre", i - 1, sign * (N - i)
    else:
        # excluded tilts are -(N-i) (left) / +(N-i) (right) for i = 2..N, so
        # the smallest admissible |m| points against the transport
        rule, m, order = "centre-alt", -sign, N
    pathway = f"center->{direction}"
    site = 0 if direction == "left" else 2
    initial = FockState(0, N, 0)
    predicted = []
    for j in range(count + 1):
        occ = [0, N - j, 0]
        occ[site] = j
        predicted.append(FockState(*occ))
    s_used, x, period = _select_zero(N, order, m, initial, predicted, s, omega_over_v, min_dominance)
    return TunnelingPlan(
        N=N,
        pathway=pathway,
        transport_count=count,
        i=i,
        rule=rule,
        bessel_order=order,
        zero_index=s_used,
        eps1_over_omega=x,
        eps0_over_omega=m,
        initial_state=initial,
        predicted_final_states=tuple(predicted),
        requested_zero_index=s,
        effective_period=period,
    )


def plan_edge_transport(
    N: int,
    count: int,
    side: str,
    s: int = 1,
    omega_over_v: float = DEFAULT_OMEGA_OVER_V,
    min_dominance: float = MIN_DOMINANCE,
) -> TunnelingPlan:
    """Move ``count`` bosons from an edge well, holding N-1, into the centre."""
    sign = _direction_sign(side)
    i = count + 1
    if not 1 <= i <= N - 1:
        raise PlanningError(f"edge transport needs 0 ≤ count ≤ N−2 (= {N - 2}), got {count}")
    m = sign * (N - i - 1)
    if side == "left":
        initial = FockState(N - 1, 1, 0)
        predicted = [FockState(N - 1 - j, 1 + j, 0) for j in range(count + 1)]
    else:
        initial = FockState(0, 1, N - 1)
        predicted = [FockState(0, 1 + j, N - 1 - j) for j in range(count + 1)]
    s_used, x, period = _select_zero(N, i, m, initial, predicted, s, omega_over_v, min_dominance)
    return TunnelingPlan(
        N=N,
        pathway=f"{side}->center",
        transport_count=count,
        i=i,
        rule="edge",
        bessel_order=i,
        zero_index=s_used,
        eps1_over_omega=x,
        eps0_over_omega=m,
        initial_state=initial,
        predicted_final_states=tuple(predicted),
        requested_zero_index=s,
        effective_period=period,
    )


def plan(N: int, count: int, pathway: str, s: int = 1, **kw) -> TunnelingPlan:
    if pathway not in PATHWAYS:
        raise PlanningError(f"pathway must be one of {', '.join(PATHWAYS)}")
    src, dst = pathway.split("->")
    if src == "center":
        return plan_center_transport(N, count, dst, s, **kw)
    return plan_edge_transport(N, count, src, s, **kw)


def all_plans(N: int, s: int = 1, **kw) -> list[TunnelingPlan]:
    """Every (count, pathway) combination the two rule families allow."""
    plans = []
    for direction in ("left", "right"):
        plans += [plan_center_transport(N, k, direction, s, **kw) for k in range(N)]
        plans += [plan_edge_transport(N, k, direction, s, **kw) for k in range(N - 1)]
    return plans


@dataclass
class Verification:
    t_end: float
    leakage: float
    max_deviation: float
    observed_count: int
    norm_drift: float
    passed: bool
    leak_tol: float
    trajectory: Trajectory | None = field(default=None, repr=False)

    def summary(self) -> dict:
        return {
            "t_end": self.t_end,
            "leakage": self.leakage,
            "max_deviation": self.max_deviation,
            "observed_count": self.observed_count,
            "norm_drift": self.norm_drift,
            "leak_tol": self.leak_tol,
            "passed": self.passed,
        }


def transported_count(traj: Trajectory, pathway: str) -> tuple[int, float]:
    pops = traj.populations[:, SOURCE_SITE[pathway]]
    dev = float(np.max(np.abs(pops - pops[0])))
    return int(math.floor(dev + 0.5)), dev


def verify_plan(
    tplan: TunnelingPlan,
    base: ModelParams,
    t_end: float | None = None,
    tol: float = 1e-10,
    leak_tol: float = 0.05,
    sample_dt: float | None = None,
) -> Verification:
    """Run the exact dynamics for a plan and score it.

    Passes when no sample has more than ``leak_tol`` probability outside the
    predicted states, the rounded maximal change of the source-well occupation
    equals the planned count, and that change does not exceed the count by
    more than the guard band.
    """
    params = tplan.params(base)
    basis = build_basis(tplan.N)
    if t_end is None:
        t_end = tplan.default_t_end(base.v)
    if sample_dt is None:
        sample_dt = params.period / DENSE_SAMPLES_PER_PERIOD
    traj = propagate(params, basis, basis.basis_vector(tplan.initial_state), t_end, sample_dt, tol)
    leak = traj.leakage(tplan.predicted_final_states)
    observed, dev = transported_count(traj, tplan.pathway)
    passed = (
        leak < leak_tol
        and observed == tplan.transport_count
        and dev <= tplan.transport_count + COUNT_GUARD
    )
    return Verification(t_end, leak, dev, observed, traj.norm_drift, passed, leak_tol, traj)


def mirror_discrepancy(tplan: TunnelingPlan, base: ModelParams, t_end: float | None = None, tol: float = 1e-10):
    """Largest population mismatch between a run and its site-mirrored twin.

    The twin uses the mirrored plan (eps0 -> -eps0) with the drive shifted by
    half a period, i.e. eps1 -> -eps1, which makes the symmetry exact.
    """
    if t_end is None:
        t_end = tplan.default_t_end(base.v)
    basis = build_basis(tplan.N)
    p = tplan.params(base)
    mp = tplan.mirrored().params(base).with_drive(-p.eps0, -p.eps1)
    a = propagate(p, basis, basis.basis_vector(tplan.initial_state), t_end, tol=tol)
    b = propagate(mp, basis, basis.basis_vector(tplan.initial_state.mirrored()), t_end, tol=tol)
    return float(np.max(np.abs(a.populations[:, ::-1] - b.populations)))
