import math

import numpy as np
import pytest

from resilience_lab.bounds import (
    TimeGrid,
    Trajectory,
    baseline_bounds,
    bound_ladder,
    certify_lemma,
    coherent_error_bound,
    cross_expansion,
    delta_on_state,
    disorder_trace_bound,
    ensemble_rms_error,
    ensemble_trace_distance,
    entanglement_bound,
    entanglement_delta,
    estimate_crossover,
    exact_error,
    haar_average_expectation,
    integral_bound,
    pauli_coefficients,
    segmented_td_bound,
    split_bound,
)
from resilience_lab.dynamics import basis_state, haar_state, plus_state, propagator_const
from resilience_lab.operators import Cosine, OperatorSum, PauliString
from resilience_lab.perturbation import build_qimf_1d, sample, standard_qimf_noise


def op_from(n, *terms):
    return OperatorSum.from_terms(
        n, [(c, PauliString.from_factors(f)) for c, f in terms]
    )


def test_time_grid_validation():
    with pytest.raises(ValueError):
        TimeGrid(np.array([0.5, 1.0]))
    with pytest.raises(ValueError):
        TimeGrid(np.array([0.0, 1.0, 0.5]))
    g = TimeGrid.regular(2.0, 5)
    assert g.refined().points.size == 9
    assert g.t_final == 2.0


def test_exact_error_zero_perturbation():
    h = build_qimf_1d(3)
    u = propagator_const(h, 1.0)
    assert exact_error(u, u, basis_state(3)) == 0.0


def test_integral_bound_anticommuting_is_exactly_linear():
    # H_pert = aX + bY anticommutes termwise, so <H^2> = a^2 + b^2 on any state
    n = 3
    h0 = build_qimf_1d(n)
    a, b = 0.03, 0.04
    h_pert = op_from(n, (a, [(0, "X")]), (b, [(0, "Y")]))
    grid = TimeGrid.regular(2.0, 11)
    rng = np.random.default_rng(1)
    for _ in range(10):
        traj = Trajectory(h0, haar_state(n, rng))
        curve = integral_bound(h_pert, traj, grid)
        assert np.allclose(curve, math.hypot(a, b) * grid.points, atol=1e-10)


def test_entanglement_delta_product_state():
    # product state: subsystem entropies vanish, Delta is the full coefficient sum
    n = 2
    h_pert = op_from(n, (0.1, [(0, "X")]), (0.2, [(1, "X")]))
    products = cross_expansion(h_pert)
    trace_part, delta = entanglement_delta(products, basis_state(n), n)
    assert trace_part == pytest.approx(0.1**2 + 0.2**2)
    # cross terms X0 X1 (both orders) carry weight 2*0.02*sqrt(4 ln 2)
    assert delta == pytest.approx(2 * 0.02 * math.sqrt(4 * math.log(2)))


def test_delta_vanishes_on_maximally_mixed_marginals():
    # cross products of X0 and Z0 stay on qubit 0, which is maximally mixed
    # in a Bell state, so the entropy correction cancels the ln(2) budget
    n = 2
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1 / math.sqrt(2)
    h_pert = op_from(n, (0.1, [(0, "X")]), (0.2, [(0, "Z")]))
    assert delta_on_state(h_pert, bell) == pytest.approx(0.0, abs=1e-7)


def test_ladder_ordering_random_systems():
    rng = np.random.default_rng(0)
    for seed in range(3):
        n = 4
        h0 = build_qimf_1d(n)
        real = sample(standard_qimf_noise(n, 0.1, 0.02), seed)
        psi = haar_state(n, rng)
        grid = TimeGrid.regular(2.0, 9)
        report = bound_ladder(h0, real.h_pert, psi, grid)
        assert report.ladder_violations() == []


def test_baselines():
    h_pert = op_from(2, (0.3, [(0, "Z")]))
    haar, worst = baseline_bounds(h_pert, 2.0)
    assert haar == pytest.approx(0.6)
    assert worst == pytest.approx(0.6)
    two = op_from(2, (0.3, [(0, "Z")]), (0.4, [(1, "Z")]))
    haar2, worst2 = baseline_bounds(two, 1.0)
    assert haar2 == pytest.approx(0.5)
    assert worst2 == pytest.approx(0.7)
    assert haar2 <= worst2


def test_split_bound_limits():
    n = 3
    h0 = build_qimf_1d(n)
    h_pert = op_from(n, (0.05, [(0, "X")]), (0.05, [(1, "X"), (2, "X")]))
    grid = TimeGrid.regular(2.0, 9)
    traj = Trajectory(h0, basis_state(n))
    from resilience_lab.operators import frobenius_norm

    full_fro = frobenius_norm(h_pert) * grid.points
    assert np.allclose(split_bound(h_pert, traj, grid, 0.0), full_fro)
    all_integral = split_bound(h_pert, traj, grid, grid.t_final)
    assert np.allclose(all_integral, integral_bound(h_pert, traj, grid), rtol=1e-3)
    with pytest.raises(ValueError):
        split_bound(h_pert, traj, grid, 3.0)


def test_crossover_flat_curve_is_zero():
    # perturbation anticommuting termwise: <H^2> is flat at the Frobenius level
    n = 2
    h0 = build_qimf_1d(n)
    h_pert = op_from(n, (0.1, [(0, "X")]), (0.1, [(0, "Y")]))
    traj = Trajectory(h0, basis_state(n))
    grid = TimeGrid.regular(2.0, 21)
    assert estimate_crossover(h_pert, traj, grid) == 0.0


def test_segmented_matches_static_for_constant_envelopes():
    n = 3
    h0 = build_qimf_1d(n)
    h_pert = op_from(n, (0.05, [(0, "X")]), (0.03, [(1, "X"), (2, "X")]))
    grid = TimeGrid.regular(1.5, 13)
    traj = Trajectory(h0, basis_state(n))
    static = entanglement_bound(h_pert, traj, grid)[-1]
    segmented = segmented_td_bound(h_pert, traj, grid, n_segments=5)
    assert segmented == pytest.approx(static, rel=1e-3)


def test_segmented_td_runs_with_envelope():
    n = 2
    h0 = build_qimf_1d(n)
    h_pert = OperatorSum.from_terms(
        n, [(0.05, Cosine(2.0), PauliString.from_factors([(0, "X")]))]
    )
    grid = TimeGrid.regular(1.0, 9)
    traj = Trajectory(h0, basis_state(n))
    value = segmented_td_bound(h_pert, traj, grid, n_segments=4)
    assert value > 0.0
    # bound must dominate the integral bound tail term structure
    exact = integral_bound(h_pert, traj, grid)[-1]
    assert value >= exact - 1e-6


def test_disorder_trace_bound_shape():
    n = 3
    h0 = build_qimf_1d(n)
    model = standard_qimf_noise(n, 0.1, 0.0)
    traj = Trajectory(h0, basis_state(n))
    grid = TimeGrid.regular(2.0, 5)
    curve = disorder_trace_bound(model, traj, grid)
    assert np.allclose(curve, 2.0 * grid.points * math.sqrt(3 * 0.01))


def test_ensemble_estimates_deterministic():
    n = 3
    h0 = build_qimf_1d(n)
    model = standard_qimf_noise(n, 0.1, 0.0)
    psi = basis_state(n)
    a = ensemble_trace_distance(h0, model, psi, 1.0, 20, 5)
    b = ensemble_trace_distance(h0, model, psi, 1.0, 20, 5)
    assert a == b
    r1 = ensemble_rms_error(h0, model, psi, 1.0, 20, 5)
    r2 = ensemble_rms_error(h0, model, psi, 1.0, 20, 5)
    assert r1 == r2
    assert a[0] > 0 and r1[0] > 0


def test_trace_distance_convention():
    # orthogonal pure states are at trace distance 2 under Tr|A| = sum |eig|
    n = 2
    h0 = op_from(n, (0.0, []))
    model = standard_qimf_noise(n, 0.0, 0.0)
    # zero noise: averaged state equals the ideal one
    d, _ = ensemble_trace_distance(h0, model, basis_state(n), 1.0, 4, 0)
    assert d == pytest.approx(0.0, abs=1e-12)


def test_coherent_bound():
    n = 3
    e_op = op_from(n, *[(1.0, [(i, "X")]) for i in range(n)])
    u0 = propagator_const(build_qimf_1d(n), 0.5)
    lam = 1e-3
    rng = np.random.default_rng(9)
    for _ in range(20):
        psi = haar_state(n, rng)
        exact, bound = coherent_error_bound(u0, e_op, lam, psi)
        assert exact <= bound + 1e-12


def test_pauli_coefficients_roundtrip():
    rng = np.random.default_rng(2)
    n = 2
    b = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    a = b + b.conj().T
    coeffs = pauli_coefficients(a, n)
    rebuilt = OperatorSum.from_terms(n, [(c, s) for s, c in coeffs.items()]).to_dense()
    assert np.allclose(rebuilt, a)


def test_certify_lemma_small():
    trials = certify_lemma(50, 1, max_qubits=4)
    assert len(trials) == 50
    assert min(t.margin for t in trials) >= 0.0


def test_haar_average_matches_frobenius():
    h_pert = op_from(4, (0.1, [(0, "X")]), (0.05, [(1, "Z"), (2, "Z")]))
    mean, stderr = haar_average_expectation(h_pert, 4, 500, 3)
    from resilience_lab.operators import frobenius_norm

    assert abs(mean - frobenius_norm(h_pert) ** 2) < 3 * stderr
