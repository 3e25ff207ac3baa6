"""Cross-term diagnostics for entanglement-driven error suppression.

For a perturbation H = sum_j c_j P_j the gap between the integral bound and
its Frobenius baseline is carried by the normalized cross expectations
<P_j^dag P_j' + h.c.> / (||P_j|| ||P_j'||) evaluated on the evolving state;
these decay toward zero as the state entangles.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .dynamics import _as_array
from .operators import OperatorSum, PauliString, pauli_mul


@dataclass(frozen=True)
class CrossTermRecord:
    left: str
    right: str
    value: float


def structure_pairs(h_pert: OperatorSum, t: float = 0.0) -> list[tuple[PauliString, PauliString]]:
    """Ordered pairs (j < j') of distinct Pauli terms whose product is not
    proportional to the identity."""
    strings = sorted(h_pert.coeffs_at(t), key=lambda s: (s.x, s.z))
    pairs = []
    for a in range(len(strings)):
        for b in range(a + 1, len(strings)):
            _, prod = pauli_mul(strings[a], strings[b])
            if not prod.is_identity():
                pairs.append((strings[a], strings[b]))
    return pairs


def cross_term_expectations(
    h_pert: OperatorSum, psi, t: float = 0.0
) -> list[CrossTermRecord]:
    """Normalized <psi|(P^dag Q + Q^dag P)|psi| for every structure pair.

    Pauli strings are unitary, so the normalization by operator norms is 1
    and the value reduces to 2 Re(phase * <product string>).
    """
    vec = _as_array(psi)
    records = []
    cache: dict[PauliString, complex] = {}
    for left, right in structure_pairs(h_pert, t):
        phase, prod = pauli_mul(left, right)
        exp = cache.get(prod)
        if exp is None:
            op = OperatorSum.from_terms(h_pert.n_sites, [(1.0, prod)])
            exp = complex(op.expectation(vec))
            cache[prod] = exp
        value = 2.0 * (phase * exp).real
        records.append(CrossTermRecord(str(left), str(right), value))
    return records


def histogram(
    records: list[CrossTermRecord], n_bins: int = 40,
    value_range: tuple[float, float] = (-2.0, 2.0),
) -> tuple[np.ndarray, np.ndarray]:
    """(counts, bin_edges) over the normalized cross-term values."""
    values = np.array([r.value for r in records])
    return np.histogram(values, bins=n_bins, range=value_range)


def write_records(path, t: float, records: list[CrossTermRecord]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "left_term", "right_term", "value"])
        for r in records:
            writer.writerow([f"{t:.10g}", r.left, r.right, f"{r.value:.10e}"])
