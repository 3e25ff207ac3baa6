import math

import numpy as np
import pytest

from resilience_lab.dynamics import (
    EvolutionConfig,
    StateVector,
    _step_td,
    basis_state,
    entropy,
    evolve_const,
    evolve_td,
    haar_state,
    plus_state,
    propagator,
    propagator_const,
    propagator_table,
    reduced_density,
    subsystem_entropy,
)
from resilience_lab.operators import Cosine, OperatorSum, PauliString


def random_hermitian_op(n, rng, n_terms=6):
    terms = []
    for _ in range(n_terms):
        labels = rng.choice(list("IXYZ"), n)
        factors = [(i, lab) for i, lab in enumerate(labels) if lab != "I"]
        terms.append((float(rng.standard_normal()), PauliString.from_factors(factors)))
    return OperatorSum.from_terms(n, terms)


def test_state_vector_norm_check():
    with pytest.raises(ValueError):
        StateVector(np.array([1.0, 1.0], dtype=complex), 1)
    StateVector(basis_state(2), 2)


def test_evolve_const_unitary_and_phase():
    # single spin under Z: |+> picks up relative phase 2t
    h = OperatorSum.from_terms(1, [(1.0, PauliString.from_factors([(0, "Z")]))])
    psi = plus_state(1)
    out = evolve_const(h, psi, 0.7)
    expected = np.array([np.exp(-0.7j), np.exp(0.7j)]) / math.sqrt(2)
    assert np.allclose(out, expected)
    assert abs(np.linalg.norm(out) - 1.0) < 1e-12


def test_evolve_td_constant_matches_const():
    rng = np.random.default_rng(2)
    for _ in range(10):
        h = random_hermitian_op(4, rng)
        psi = haar_state(4, rng)
        a = evolve_const(h, psi, 0.9)
        b = evolve_td(h, psi, 0.9)
        assert np.linalg.norm(a - b) < 1e-10


def test_td_stepper_matches_exact_single_spin():
    # H(t) = cos(w t) X has commuting time slices; exact solution known
    w = 1.3
    h = OperatorSum.from_terms(
        1, [(1.0, Cosine(w), PauliString.from_factors([(0, "X")]))]
    )
    t = 2.0
    phase = math.sin(w * t) / w
    psi = basis_state(1)
    expected = np.array([math.cos(phase), -1j * math.sin(phase)])
    out = evolve_td(h, psi, t, EvolutionConfig(dt=0.05, tol=1e-10))
    assert np.linalg.norm(out - expected) < 1e-9


def test_td_stepper_fourth_order():
    # non-commuting drive: halving dt should shrink the error ~16x
    rng = np.random.default_rng(7)
    base = random_hermitian_op(3, rng)
    drive = OperatorSum.from_terms(
        3, [(0.8, Cosine(2.0), PauliString.from_factors([(0, "X"), (1, "X")]))]
    )
    h = base + drive
    psi = haar_state(3, rng)
    ref = _step_td(h, psi, 0.0, 1.0, 1e-3)
    errs = [np.linalg.norm(_step_td(h, psi, 0.0, 1.0, dt) - ref) for dt in (0.2, 0.1, 0.05)]
    assert errs[0] / errs[1] > 10.0
    assert errs[1] / errs[2] > 10.0


def test_propagator_columns():
    rng = np.random.default_rng(4)
    h = random_hermitian_op(3, rng)
    u = propagator_const(h, 1.1)
    assert np.allclose(u.conj().T @ u, np.eye(8), atol=1e-9)
    for i in range(8):
        e = np.zeros(8, dtype=complex)
        e[i] = 1.0
        assert np.allclose(u[:, i], evolve_const(h, e, 1.1))


def test_propagator_table_matches_single_calls():
    h = OperatorSum.from_terms(
        2,
        [
            (0.5, Cosine(1.0), PauliString.from_factors([(0, "X")])),
            (0.3, PauliString.from_factors([(0, "Z"), (1, "Z")])),
        ],
    )
    times = [0.0, 0.4, 1.0]
    cfg = EvolutionConfig(dt=0.05, tol=1e-9)
    table = propagator_table(h, times, cfg)
    for t, u in zip(times, table):
        assert np.linalg.norm(u - propagator(h, t, cfg)) < 1e-7


def test_reduced_density_bell():
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1 / math.sqrt(2)
    rho = reduced_density(bell, [0])
    assert np.allclose(rho, np.eye(2) / 2)
    assert subsystem_entropy(bell, [0], units="bits") == pytest.approx(1.0)


def test_reduced_density_purity_oracle():
    # purity from the partial trace must match the brute-force double sum
    rng = np.random.default_rng(11)
    psi = haar_state(5, rng)
    keep = [1, 3]
    rho = reduced_density(psi, keep, 5)
    purity = float(np.real(np.trace(rho @ rho)))
    brute = 0.0
    d = 32
    for i in range(d):
        for j in range(d):
            for k in range(d):
                for l in range(d):
                    same_keep_ij_kl = all(
                        ((i >> q) & 1) == ((l >> q) & 1)
                        and ((j >> q) & 1) == ((k >> q) & 1)
                        for q in keep
                    )
                    same_rest = all(
                        ((i >> q) & 1) == ((j >> q) & 1)
                        and ((k >> q) & 1) == ((l >> q) & 1)
                        for q in range(5)
                        if q not in keep
                    )
                    if same_keep_ij_kl and same_rest:
                        brute += np.real(
                            psi[i] * psi[j].conj() * psi[k] * psi[l].conj()
                        )
    assert purity == pytest.approx(brute, abs=1e-10)


def test_reduced_density_ordering():
    # |0>|1> on qubits (1,0): qubit 0 is the least significant bit
    psi = np.zeros(4, dtype=complex)
    psi[1] = 1.0  # basis index 1 = qubit0 excited
    rho0 = reduced_density(psi, [0])
    assert rho0[1, 1] == pytest.approx(1.0)
    rho1 = reduced_density(psi, [1])
    assert rho1[0, 0] == pytest.approx(1.0)


def test_entropy_symmetry():
    rng = np.random.default_rng(3)
    psi = haar_state(6, rng)
    keep = [0, 2, 5]
    rest = [1, 3, 4]
    sa = subsystem_entropy(psi, keep, 6)
    sb = subsystem_entropy(psi, rest, 6)
    assert sa == pytest.approx(sb, abs=1e-10)


def test_entropy_units_and_errors():
    rho = np.diag([0.5, 0.5])
    assert entropy(rho, "bits") == pytest.approx(1.0)
    assert entropy(rho, "nats") == pytest.approx(math.log(2))
    with pytest.raises(ValueError):
        entropy(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        entropy(rho, "dits")
