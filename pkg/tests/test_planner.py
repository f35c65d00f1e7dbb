import json

import pytest

from shaken_trimer.bessel import bessel_j, bessel_zero
from shaken_trimer.model import BASE_PARAMS, ModelParams
from shaken_trimer.planner import (
    PATHWAYS,
    PlanningError,
    all_plans,
    mirror_discrepancy,
    plan,
    plan_center_transport,
    plan_edge_transport,
    verify_plan,
)


@pytest.mark.parametrize(
    "call,m,x,order,s",
    [
        (lambda: plan_center_transport(4, 1, "right"), 1, 5.1356, 2, 1),
        (lambda: plan_center_transport(4, 2, "right"), 2, 7.0156, 1, 2),
        (lambda: plan_center_transport(4, 3, "right"), -1, 7.5883, 4, 1),
        (lambda: plan_edge_transport(4, 0, "left"), -2, 3.8317, 1, 1),
        (lambda: plan_edge_transport(4, 1, "left"), -1, 5.1356, 2, 1),
        (lambda: plan_edge_transport(4, 2, "left"), 0, 6.3802, 3, 1),
    ],
)
def test_known_drive_settings(call, m, x, order, s):
    p = call()
    assert p.eps0_over_omega == m
    assert p.bessel_order == order and p.zero_index == s
    assert p.eps1_over_omega == pytest.approx(x, abs=5e-5)
    assert abs(p.eps1_over_omega - bessel_zero(order, s)) < 1e-10


@pytest.mark.parametrize("N", [2, 3, 4, 6])
def test_no_transport_freezes_with_zero_tilt(N):
    p = plan_center_transport(N, 0, "left")
    assert p.i == N and p.bessel_order == N - 1 and p.eps0_over_omega == 0
    assert p.predicted_final_states == ((0, N, 0),)
    assert p.effective_period is None


def test_second_zero_is_chosen_when_first_leaves_a_weak_link():
    relaxed = plan_center_transport(4, 2, "right", min_dominance=0.0)
    assert relaxed.zero_index == 1 and relaxed.eps1_over_omega == pytest.approx(3.8317, abs=5e-5)
    strict = plan_center_transport(4, 2, "right")
    assert strict.zero_index == 2 and strict.requested_zero_index == 1
    assert strict.predicted_final_states == ((0, 4, 0), (0, 3, 1), (0, 2, 2))


@pytest.mark.parametrize("N", [2, 3, 4, 5, 6, 8])
def test_every_plan_is_consistent(N):
    for p in all_plans(N):
        assert abs(bessel_j(p.bessel_order, p.eps1_over_omega)) < 1e-12
        assert p.eps1_over_omega == bessel_zero(p.bessel_order, p.zero_index)
        assert isinstance(p.eps0_over_omega, int)
        assert p.initial_state in p.predicted_final_states
        assert len(p.predicted_final_states) == p.transport_count + 1


def _same_plan(a, b):
    da, db = a.to_dict(), b.to_dict()
    pa, pb = da.pop("effective_period"), db.pop("effective_period")
    assert da == db
    assert (pa is None and pb is None) or pa == pytest.approx(pb, rel=1e-12)


def test_mirror_plans_agree():
    for count in range(4):
        _same_plan(plan_center_transport(4, count, "left").mirrored(), plan_center_transport(4, count, "right"))
    for count in range(3):
        _same_plan(plan_edge_transport(4, count, "left").mirrored(), plan_edge_transport(4, count, "right"))


def test_plans_are_deterministic():
    a = json.dumps(plan(4, 2, "center->right").to_dict())
    b = json.dumps(plan(4, 2, "center->right").to_dict())
    assert a == b
    d = json.loads(a)
    for key in ("pathway", "count", "i", "m", "bessel_order", "s", "eps1_over_omega", "predicted_final_states"):
        assert key in d


@pytest.mark.parametrize(
    "args,match",
    [
        ((4, 4, "center->left"), "count must be ≤ N−1"),
        ((4, -1, "center->left"), "non-negative"),
        ((4, 3, "left->center"), "edge transport"),
        ((4, 1, "up->down"), "pathway"),
    ],
)
def test_bad_requests(args, match):
    with pytest.raises(PlanningError, match=match):
        plan(*args)


def test_bad_direction():
    with pytest.raises(PlanningError):
        plan_center_transport(4, 1, "up")


def test_verify_moves_one_boson():
    v = verify_plan(plan_edge_transport(4, 1, "left"), BASE_PARAMS)
    assert v.passed and v.observed_count == 1
    assert v.trajectory.populations[:, 2].max() < 0.05


def test_verify_frozen_plan():
    v = verify_plan(plan_edge_transport(4, 0, "left"), BASE_PARAMS)
    assert v.observed_count == 0 and v.t_end == 100.0


def test_verify_detuned_pair_transfer():
    detuned = ModelParams(1.0, 75.0, 40.0, 10.0, 0.0, 0.0, 35.0, 4)
    v = verify_plan(plan_center_transport(4, 1, "right"), detuned, leak_tol=0.1)
    assert v.passed


def test_verify_rejects_mismatched_N():
    with pytest.raises(PlanningError):
        verify_plan(plan_center_transport(3, 1, "right"), BASE_PARAMS)


def test_mirror_discrepancy_is_at_integrator_level():
    assert mirror_discrepancy(plan_center_transport(4, 1, "left"), BASE_PARAMS) < 1e-8


def test_pathway_list():
    assert set(PATHWAYS) == {"center->left", "center->right", "left->center", "right->center"}
