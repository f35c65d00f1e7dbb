import math
import time

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shaken_trimer.bessel import bessel_j, bessel_zero
from shaken_trimer.effective import (
    ApproximateModelWarning,
    OffResonanceError,
    averaged_coupling,
    build_effective_hamiltonian,
    closed_form_coupling,
    compare_stroboscopic,
    period_average,
    propagate_effective,
    reachable_subspace,
    slowest_period,
)
from shaken_trimer.fock import BONDS, build_basis, hop_elements
from shaken_trimer.model import BASE_PARAMS, ModelParams


def resonant(N, m, x, w=35.0):
    return ModelParams(1.0, 2 * w, w, 0.0, m * w, x * w, w, N)


def boundary_links(basis):
    for bond in BONDS:
        for row, col, _ in hop_elements(basis, bond):
            a, b = basis.states[row], basis.states[col]
            if a[0] == 0 or a[2] == 0:
                yield a, b


def check_boundary_families(Ns, ms, xs):
    worst = 0.0
    for N in Ns:
        basis = build_basis(N)
        for m in ms:
            for x in xs:
                p = resonant(N, m, x)
                effH = build_effective_hamiltonian(p, basis)
                for a, b in boundary_links(basis):
                    ref = closed_form_coupling(p, a, b)
                    worst = max(worst, abs(effH.coupling(a, b) - ref), abs(averaged_coupling(p, a, b) - ref))
    return worst


def test_boundary_couplings_match_bessel_forms():
    t0 = time.perf_counter()
    worst = check_boundary_families(range(2, 6), range(-2, 3), (0.5, 2.0, 5.1356))
    assert worst < 1e-8
    assert time.perf_counter() - t0 < 1.0


@given(st.integers(2, 6), st.integers(-3, 3), st.floats(0.0, 12.0))
def test_boundary_couplings_match_bessel_forms_anywhere(N, m, x):
    assert check_boundary_families([N], [m], [x]) < 1e-8


def test_mixed_frequency_ladder_is_also_resonant():
    # U0 - U1 = U1 - U2 = omega with U2 != 0 and a 5 v offset on every level
    p = ModelParams(1.0, 75.0, 40.0, 5.0, -35.0, 5.1356 * 35.0, 35.0, 4)
    q = resonant(4, -1, 5.1356)
    b = build_basis(4)
    np.testing.assert_allclose(
        build_effective_hamiltonian(p, b).couplings, build_effective_hamiltonian(q, b).couplings, atol=1e-12
    )


def test_interior_link_has_no_closed_form():
    p = resonant(4, 0, 2.0)
    with pytest.raises(ValueError, match="interior"):
        closed_form_coupling(p, (2, 1, 1), (1, 2, 1))
    with pytest.raises(ValueError):
        closed_form_coupling(p, (4, 0, 0), (2, 2, 0))


@pytest.mark.parametrize("q,dd,x", [(0, 1, 1.3), (2, -1, 5.0), (-3, 2, 0.7), (1, 1, 0.0)])
def test_period_average_is_a_bessel_value(q, dd, x):
    avg = period_average(q * 35.0, dd, x, 35.0)
    assert avg.real == pytest.approx(bessel_j(q, -dd * x), abs=1e-13)
    assert abs(avg.imag) < 1e-13


def test_off_resonance_is_refused_unless_asked():
    p = ModelParams(1.0, 75.0, 40.0, 10.0, 35.0, 179.75, 35.0, 4)
    b = build_basis(4)
    with pytest.raises(OffResonanceError, match="effective model undefined off resonance"):
        build_effective_hamiltonian(p, b)
    with pytest.warns(ApproximateModelWarning):
        effH = build_effective_hamiltonian(p, b, drop_detuned=True)
    assert effH.approximate and not effH.valid.all()
    assert effH.coupling((0, 4, 0), (0, 3, 1)) != 0.0


def test_structure(basis4):
    effH = build_effective_hamiltonian(resonant(4, 1, 5.1356), basis4)
    np.testing.assert_array_equal(effH.couplings, effH.couplings.T)
    np.testing.assert_array_equal(effH.phase_orders, -effH.phase_orders.T)
    assert np.all(np.diag(effH.couplings) == 0)


@pytest.mark.parametrize(
    "m,x,start,expected",
    [
        (-2, 3.8317, (3, 1, 0), {(3, 1, 0)}),
        (-1, 5.1356, (3, 1, 0), {(3, 1, 0), (2, 2, 0)}),
        (0, 6.3802, (3, 1, 0), {(3, 1, 0), (2, 2, 0), (1, 3, 0)}),
        (1, 5.1356, (0, 4, 0), {(0, 4, 0), (0, 3, 1)}),
        (2, 7.0156, (0, 4, 0), {(0, 4, 0), (0, 3, 1), (0, 2, 2)}),
        (-1, 7.5883, (0, 4, 0), {(0, 4, 0), (0, 3, 1), (0, 2, 2), (0, 1, 3)}),
    ],
)
def test_reachable_subspaces(basis4, m, x, start, expected):
    order = {3.8317: (1, 1), 5.1356: (2, 1), 6.3802: (3, 1), 7.0156: (1, 2), 7.5883: (4, 1)}[x]
    effH = build_effective_hamiltonian(resonant(4, m, bessel_zero(*order)), basis4)
    sub = reachable_subspace(effH, start, 1e-9)
    assert sub.as_set() == expected
    assert start in sub


def test_two_state_rabi_oscillation(basis4):
    effH = build_effective_hamiltonian(resonant(4, 1, bessel_zero(2, 1)), basis4)
    c = effH.coupling((0, 4, 0), (0, 3, 1))
    t = np.linspace(0, 10, 201)
    traj = propagate_effective(effH, basis4.basis_vector((0, 4, 0)), t)
    np.testing.assert_allclose(traj.probability((0, 3, 1)), np.sin(c * t) ** 2, atol=1e-12)
    sub = reachable_subspace(effH, (0, 4, 0), 1e-9)
    assert slowest_period(sub) == pytest.approx(math.pi / abs(c))


@given(st.integers(-6, 6), st.integers(-4, 4), st.floats(0.0, 15.0))
def test_quadrature_identity(q, dd, x):
    avg = period_average(q * 20.0, dd, x, 20.0)
    assert avg.real == pytest.approx(bessel_j(q, -dd * x), abs=1e-12)
    assert abs(avg.imag) < 1e-12


@pytest.mark.parametrize("m", [-2, 1, 3])
def test_single_boson_chain_with_tilt(m):
    w, x = 20.0, 2.4
    effH = build_effective_hamiltonian(ModelParams(1.0, 0, 0, 0, m * w, x * w, w, 1), build_basis(1))
    # a uniform tilt gives both bonds the same gap and the same phase factor
    assert effH.coupling((1, 0, 0), (0, 1, 0)) == pytest.approx(-bessel_j(-m, x), abs=1e-13)
    assert effH.coupling((0, 1, 0), (0, 0, 1)) == pytest.approx(-bessel_j(-m, x), abs=1e-13)
    assert abs(effH.coupling((0, 1, 0), (0, 0, 1))) == pytest.approx(abs(bessel_j(m, x)), abs=1e-13)


def test_single_boson_chain_follows_exact_dynamics():
    from shaken_trimer.propagator import propagate, stroboscopic

    p = ModelParams(1.0, 0, 0, 0, 40.0, 96.0, 40.0, 1)
    b = build_basis(1)
    exact = stroboscopic(propagate(p, b, (1, 0, 0), 10.0, sample_dt=p.period), p.omega)
    eff = propagate_effective(build_effective_hamiltonian(p, b), b.basis_vector((1, 0, 0)), exact.times)
    assert np.max(np.abs(exact.probabilities - eff.probabilities)) < 0.02


def test_single_boson_chain():
    b = build_basis(1)
    x = 1.7
    effH = build_effective_hamiltonian(ModelParams(1.0, 0, 0, 0, 0, x * 20, 20.0, 1), b)
    assert effH.coupling((1, 0, 0), (0, 1, 0)) == pytest.approx(-bessel_j(0, x), abs=1e-13)
    assert effH.coupling((0, 1, 0), (0, 0, 1)) == pytest.approx(-bessel_j(0, x), abs=1e-13)
    assert slowest_period(reachable_subspace(effH, (1, 0, 0))) == pytest.approx(
        2 * math.pi / (math.sqrt(2) * abs(bessel_j(0, x)))
    )


def test_undriven_resonant_comparison_is_tight(basis4):
    cmp = compare_stroboscopic(BASE_PARAMS, basis4, basis4.basis_vector((0, 4, 0)), 100.0)
    assert cmp.max_discrepancy < 0.02
    assert len(cmp.times) == 558


def test_effective_csv(tmp_path, basis4):
    effH = build_effective_hamiltonian(resonant(4, 1, 5.1356), basis4)
    effH.to_csv(tmp_path / "eff.csv")
    lines = (tmp_path / "eff.csv").read_text().splitlines()
    assert len(lines) == basis4.dim + 1
    assert lines[0].startswith("state,4_0_0,3_1_0")
