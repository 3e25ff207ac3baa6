import math

import numpy as np
import pytest

from resilience_lab.operators import (
    CONSTANT,
    Cosine,
    OperatorSum,
    PauliString,
    Product,
    RcpEnvelope,
    Sine,
    dagger_coeffs,
    diagonal_values,
    frobenius_norm,
    operator_norms,
    parse_operator,
    pauli_dense,
    pauli_mul,
    paulis_commute,
    product_terms,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
SINGLE = {"I": I2, "X": X, "Y": Y, "Z": Z}


def string_from_labels(labels):
    return PauliString.from_factors(
        [(i, lab) for i, lab in enumerate(labels) if lab != "I"]
    )


ALL_2Q = [(a, b) for a in "IXYZ" for b in "IXYZ"]


def test_single_site_dense():
    for lab in "XYZ":
        s = PauliString.from_factors([(0, lab)])
        assert np.allclose(pauli_dense(s, 1), SINGLE[lab])


def test_pauli_mul_exhaustive_two_sites():
    # multiply every pair of 2-qubit Pauli strings and compare with dense
    for la in ALL_2Q:
        for lb in ALL_2Q:
            pa, pb = string_from_labels(la), string_from_labels(lb)
            phase, prod = pauli_mul(pa, pb)
            lhs = pauli_dense(pa, 2) @ pauli_dense(pb, 2)
            rhs = phase * pauli_dense(prod, 2)
            assert np.allclose(lhs, rhs), (la, lb)


def test_pauli_mul_phases():
    x = PauliString.from_factors([(0, "X")])
    y = PauliString.from_factors([(0, "Y")])
    z = PauliString.from_factors([(0, "Z")])
    assert pauli_mul(x, y) == (1j, z)
    assert pauli_mul(y, x) == (-1j, z)
    phase, prod = pauli_mul(x, x)
    assert phase == 1 and prod.is_identity()


def test_commute_matches_dense():
    rng = np.random.default_rng(5)
    for _ in range(100):
        la = tuple(rng.choice(list("IXYZ"), 3))
        lb = tuple(rng.choice(list("IXYZ"), 3))
        pa, pb = string_from_labels(la), string_from_labels(lb)
        da, db = pauli_dense(pa, 3), pauli_dense(pb, 3)
        expected = np.allclose(da @ db, db @ da)
        assert paulis_commute(pa, pb) == expected


def test_string_properties():
    s = PauliString.from_factors([(0, "X"), (2, "Y"), (3, "Z")])
    assert s.support == frozenset({0, 2, 3})
    assert s.weight == 3
    assert str(s) == "X0 Y2 Z3"
    assert not s.is_identity()
    assert PauliString().is_identity()


def test_operator_dense_matches_kron():
    h = OperatorSum.from_terms(
        2,
        [
            (0.5, string_from_labels(("X", "I"))),
            (1.5, string_from_labels(("Z", "Z"))),
        ],
    )
    expected = 0.5 * np.kron(I2, X) + 1.5 * np.kron(Z, Z)
    assert np.allclose(h.to_dense(), expected)


def test_apply_matches_dense():
    rng = np.random.default_rng(0)
    for _ in range(20):
        labels = tuple(rng.choice(list("IXYZ"), 4))
        coeff = complex(rng.standard_normal(), rng.standard_normal())
        op = OperatorSum.from_terms(4, [(coeff, string_from_labels(labels))])
        psi = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        assert np.allclose(op.apply(psi), op.to_dense() @ psi)


def test_norms():
    op = OperatorSum.from_terms(
        3,
        [
            (2.0, string_from_labels(("X", "I", "I"))),
            (1.0, string_from_labels(("I", "Z", "Z"))),
        ],
    )
    spectral, fro = operator_norms(op)
    mat = op.to_dense()
    assert spectral == pytest.approx(np.abs(np.linalg.eigvalsh(mat)).max())
    assert fro == pytest.approx(np.linalg.norm(mat) / math.sqrt(8))
    assert frobenius_norm(op) == pytest.approx(math.sqrt(5.0))


def test_diagonal_values():
    op = OperatorSum.from_terms(
        3,
        [
            (1.0, string_from_labels(("Z", "I", "I"))),
            (0.5, string_from_labels(("I", "Z", "Z"))),
        ],
    )
    assert np.allclose(diagonal_values(op), np.diag(op.to_dense()))
    bad = OperatorSum.from_terms(1, [(1.0, string_from_labels(("X",)))])
    with pytest.raises(ValueError):
        diagonal_values(bad)


def test_product_terms_matches_dense():
    rng = np.random.default_rng(3)
    terms_a = [
        (complex(rng.standard_normal()), string_from_labels(tuple(rng.choice(list("IXYZ"), 3))))
        for _ in range(4)
    ]
    terms_b = [
        (complex(rng.standard_normal()), string_from_labels(tuple(rng.choice(list("IXYZ"), 3))))
        for _ in range(4)
    ]
    a = OperatorSum.from_terms(3, terms_a)
    b = OperatorSum.from_terms(3, terms_b)
    merged = product_terms(a.coeffs_at(0.0), b.coeffs_at(0.0))
    dense = sum(c * pauli_dense(s, 3) for s, c in merged.items())
    assert np.allclose(dense, a.to_dense() @ b.to_dense())


def test_dagger_coeffs():
    op = OperatorSum.from_terms(2, [(1 + 2j, string_from_labels(("X", "Y")))])
    conj = dagger_coeffs(op.coeffs_at(0.0))
    dense = sum(c * pauli_dense(s, 2) for s, c in conj.items())
    assert np.allclose(dense, op.to_dense().conj().T)


def test_hermiticity_and_simplify():
    s = string_from_labels(("X", "X"))
    op = OperatorSum.from_terms(2, [(1.0, s), (0.5, s)])
    assert op.is_hermitian()
    simplified = op.simplify()
    assert len(simplified.terms) == 1
    assert simplified.coeffs_at()[s] == pytest.approx(1.5)
    assert not OperatorSum.from_terms(2, [(1j, s)]).is_hermitian()


def test_envelopes():
    assert CONSTANT.value(3.7) == 1.0
    assert Cosine(2.0, 0.5).value(1.0) == pytest.approx(math.cos(2.5))
    assert Sine(2.0).value(0.25) == pytest.approx(math.sin(0.5))
    prod = Product((Cosine(1.0), Sine(1.0)))
    assert prod.value(0.7) == pytest.approx(math.cos(0.7) * math.sin(0.7))


def test_rcp_envelope_window():
    env = RcpEnvelope(2.0, 10.0, (0.5, 0.1, 0.0, 0.0, 0.0, 0.0), (0.2, 0, 0, 0, 0))
    assert env.value(0.0) == 0.0
    assert env.value(10.0) == pytest.approx(0.0, abs=1e-12)
    t = 3.0
    expected = 2.0 * math.sin(math.pi * t / 10.0) * (
        0.5 + 0.1 * math.cos(2 * math.pi * t / 10.0 + 0.2)
    )
    assert env.value(t) == pytest.approx(expected)
    with pytest.raises(ValueError):
        env.value(11.0)


def test_parse_round_trip():
    op = parse_operator("0.5 * X0 X1\n-0.25 * Z2", 3)
    expected = OperatorSum.from_terms(
        3,
        [
            (0.5, string_from_labels(("X", "X", "I"))),
            (-0.25, string_from_labels(("I", "I", "Z"))),
        ],
    )
    assert np.allclose(op.to_dense(), expected.to_dense())


def test_parse_envelope():
    op = parse_operator("1.0 * X0 @cos(w=2.0, phi=0.1)", 1)
    assert op.coeffs_at(0.0)[string_from_labels(("X",))] == pytest.approx(
        math.cos(0.1)
    )
    assert not op.is_constant()


def test_site_range_enforced():
    with pytest.raises(ValueError):
        OperatorSum.from_terms(1, [(1.0, PauliString.from_factors([(3, "X")]))])
