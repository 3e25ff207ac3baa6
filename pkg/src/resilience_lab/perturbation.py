"""Benchmark Hamiltonians (transverse-field Ising chains and lattices) and
seeded sampling of disorder + imperfection perturbations.

Disorder coefficients are drawn from zero-mean Gaussians with a counter-based
Philox generator so ensembles are reproducible across platforms; the RNG
identity is recorded in scenario metadata.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import OperatorSum, PauliString

# transverse-field Ising defaults used throughout the figure scenarios
QIMF_HX = 0.809
QIMF_HY = 0.9045
QIMF_J = 1.0

RNG_IDENTITY = "numpy.random.Generator(Philox) standard_normal"


def build_qimf_1d(
    N: int, h_x: float = QIMF_HX, h_y: float = QIMF_HY, J: float = QIMF_J
) -> OperatorSum:
    """Open transverse-field Ising chain h_x sum X + h_y sum Y + J sum XX."""
    if N < 2:
        raise ValueError("need at least 2 spins")
    terms = []
    for i in range(N):
        terms.append((h_x, PauliString.from_factors([(i, "X")])))
        terms.append((h_y, PauliString.from_factors([(i, "Y")])))
    for i in range(N - 1):
        terms.append((J, PauliString.from_factors([(i, "X"), (i + 1, "X")])))
    return OperatorSum.from_terms(N, terms)


def lattice_edges(rows: int, cols: int) -> list[tuple[int, int]]:
    """Nearest-neighbor edges of an open rectangular lattice, row-major ids."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                edges.append((i, i + 1))
            if r + 1 < rows:
                edges.append((i, i + cols))
    return edges


def build_qimf_2d(
    rows: int, cols: int, h_x: float = QIMF_HX, h_y: float = QIMF_HY,
    J: float = QIMF_J,
) -> OperatorSum:
    N = rows * cols
    terms = []
    for i in range(N):
        terms.append((h_x, PauliString.from_factors([(i, "X")])))
        terms.append((h_y, PauliString.from_factors([(i, "Y")])))
    for i, j in lattice_edges(rows, cols):
        terms.append((J, PauliString.from_factors(sorted([(i, "X"), (j, "X")]))))
    return OperatorSum.from_terms(N, terms)


@dataclass
class PerturbationModel:
    """Stochastic disorder channels (unit operator, sigma) plus static
    imperfection channels (operator, eta)."""

    n_sites: int
    disorder: list[tuple[OperatorSum, float]] = field(default_factory=list)
    imperfection: list[tuple[OperatorSum, float]] = field(default_factory=list)

    def __post_init__(self):
        for op, sigma in self.disorder:
            if sigma < 0:
                raise ValueError("sigma must be nonnegative")
            if not op.is_hermitian():
                raise ValueError("disorder channel operator must be Hermitian")
        for op, _ in self.imperfection:
            if not op.is_hermitian():
                raise ValueError("imperfection channel operator must be Hermitian")

    def imperfection_operator(self) -> OperatorSum:
        out = OperatorSum(self.n_sites)
        for op, eta in self.imperfection:
            out = out + eta * op
        return out.simplify()


@dataclass
class PerturbationRealization:
    deltas: np.ndarray
    h_pert: OperatorSum
    seed: int


def standard_qimf_noise(N: int, sigma: float, eta: float) -> PerturbationModel:
    """N single-site X disorder channels plus one XX-chain imperfection."""
    disorder = [
        (OperatorSum.from_terms(N, [(1.0, PauliString.from_factors([(i, "X")]))]), sigma)
        for i in range(N)
    ]
    xx = OperatorSum.from_terms(
        N,
        [
            (1.0, PauliString.from_factors([(i, "X"), (i + 1, "X")]))
            for i in range(N - 1)
        ],
    )
    return PerturbationModel(N, disorder, [(xx, eta)])


def lattice_qimf_noise(rows: int, cols: int, sigma: float, eta: float) -> PerturbationModel:
    """2D analogue: per-site X disorder and one imperfection coupling all
    nearest-neighbor XX edges."""
    N = rows * cols
    disorder = [
        (OperatorSum.from_terms(N, [(1.0, PauliString.from_factors([(i, "X")]))]), sigma)
        for i in range(N)
    ]
    xx = OperatorSum.from_terms(
        N,
        [
            (1.0, PauliString.from_factors(sorted([(i, "X"), (j, "X")])))
            for i, j in lattice_edges(rows, cols)
        ],
    )
    return PerturbationModel(N, disorder, [(xx, eta)])


def sample(model: PerturbationModel, seed: int) -> PerturbationRealization:
    """Draw one disorder realization; deterministic for a fixed seed."""
    rng = np.random.Generator(np.random.Philox(seed))
    deltas = np.array(
        [sigma * rng.standard_normal() for _, sigma in model.disorder]
    )
    h = OperatorSum(model.n_sites)
    for (op, _), delta in zip(model.disorder, deltas):
        if delta != 0.0:
            h = h + float(delta) * op
    for op, eta in model.imperfection:
        if eta != 0.0:
            h = h + eta * op
    return PerturbationRealization(deltas, h.simplify(), seed)
