"""Jordan-Wigner mapping, Fermi-Hubbard construction, symmetry sectors.

Mode ordering is interleaved, site-major spin-minor: mode index = 2*site +
(0 for up, 1 for down), and mode k lives on qubit k of the JW register.
Entanglement partitions over lattice sites therefore keep qubit pairs
(2j, 2j+1) per site.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .operators import CONSTANT, OperatorSum, PauliString

UP, DOWN = 0, 1


@dataclass(frozen=True)
class FermionMode:
    site: int
    spin: int  # UP or DOWN

    @property
    def index(self) -> int:
        return 2 * self.site + self.spin


def _jw_string(mode: int, axis: str) -> PauliString:
    factors = [(k, "Z") for k in range(mode)] + [(mode, axis)]
    return PauliString.from_factors(factors)


def jw_operator(mode: int | FermionMode, kind: str, n_modes: int) -> OperatorSum:
    """a_j (annihilate) = (prod_{k<j} Z_k)(X_j + iY_j)/2; create is the
    conjugate."""
    j = mode.index if isinstance(mode, FermionMode) else mode
    if not 0 <= j < n_modes:
        raise ValueError("mode index outside register")
    sign = {"annihilate": 1.0, "create": -1.0}[kind]
    return OperatorSum.from_terms(
        n_modes,
        [(0.5, _jw_string(j, "X")), (0.5j * sign, _jw_string(j, "Y"))],
    )


def number_operator(mode: int, n_modes: int) -> OperatorSum:
    """n_j = a_j^dag a_j = (I - Z_j)/2."""
    return OperatorSum.from_terms(
        n_modes,
        [(0.5, PauliString()), (-0.5, PauliString.from_factors([(mode, "Z")]))],
    )


def _hopping(m1: int, m2: int, n_modes: int, amplitude: float) -> OperatorSum:
    """amplitude * (a_m1^dag a_m2 + h.c.) expanded in Pauli strings."""
    lo, hi = sorted((m1, m2))
    mid = [(k, "Z") for k in range(lo + 1, hi)]
    xx = PauliString.from_factors([(lo, "X")] + mid + [(hi, "X")])
    yy = PauliString.from_factors([(lo, "Y")] + mid + [(hi, "Y")])
    return OperatorSum.from_terms(
        n_modes, [(0.5 * amplitude, xx), (0.5 * amplitude, yy)]
    )


def _double_occupancy(site: int, n_modes: int) -> OperatorSum:
    """n_{site,up} n_{site,down} = (I - Z_u)(I - Z_d)/4."""
    u, d = 2 * site, 2 * site + 1
    zu = PauliString.from_factors([(u, "Z")])
    zd = PauliString.from_factors([(d, "Z")])
    zz = PauliString.from_factors([(u, "Z"), (d, "Z")])
    return OperatorSum.from_terms(
        n_modes, [(0.25, PauliString()), (-0.25, zu), (-0.25, zd), (0.25, zz)]
    )


def _hubbard_from_edges(
    n_sites: int, edges: list[tuple[int, int]], coulomb: float, hopping: float
) -> OperatorSum:
    n_modes = 2 * n_sites
    h = OperatorSum(n_modes)
    for i, j in edges:
        for spin in (UP, DOWN):
            h = h + _hopping(2 * i + spin, 2 * j + spin, n_modes, -hopping)
    if coulomb != 0.0:
        for site in range(n_sites):
            h = h + coulomb * _double_occupancy(site, n_modes)
    return h.simplify()


def build_hubbard(
    L: int, coulomb: float, hopping: float = 1.0, boundary: str = "periodic"
) -> OperatorSum:
    """1D Fermi-Hubbard chain on 2L JW qubit modes."""
    if L < 2:
        raise ValueError("need at least 2 sites")
    edges = [(i, i + 1) for i in range(L - 1)]
    if boundary == "periodic" and L > 2:
        edges.append((L - 1, 0))
    elif boundary not in ("periodic", "open"):
        raise ValueError(f"unknown boundary {boundary!r}")
    return _hubbard_from_edges(L, edges, coulomb, hopping)


def build_hubbard_2d(
    rows: int, cols: int, coulomb: float, hopping: float = 1.0,
    boundary: str = "periodic",
) -> OperatorSum:
    """Rectangular Fermi-Hubbard lattice (sites indexed row-major). Periodic
    wrapping is applied only along dimensions longer than 2 sites."""
    def sid(r: int, c: int) -> int:
        return r * cols + c

    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((sid(r, c), sid(r, c + 1)))
            elif boundary == "periodic" and cols > 2:
                edges.append((sid(r, c), sid(r, 0)))
            if r + 1 < rows:
                edges.append((sid(r, c), sid(r + 1, c)))
            elif boundary == "periodic" and rows > 2:
                edges.append((sid(r, c), sid(0, c)))
    return _hubbard_from_edges(rows * cols, edges, coulomb, hopping)


def hubbard_perturbation(L: int, delta: float) -> OperatorSum:
    """On-site Coulomb error term delta * sum_i n_up n_down."""
    n_modes = 2 * L
    h = OperatorSum(n_modes)
    if delta == 0.0:
        return h
    for site in range(L):
        h = h + delta * _double_occupancy(site, n_modes)
    return h.simplify()


# ---------------------------------------------------------------------------
# symmetry sectors
# ---------------------------------------------------------------------------


@dataclass
class SectorBasis:
    """Fixed (n_up, n_down) occupation sector of an L-site lattice.

    ``states`` lists full-register occupation bitmasks in increasing order;
    ``index_of`` maps a full-space basis index to its sector index (-1
    outside the sector).
    """

    L: int
    n_up: int
    n_down: int
    states: np.ndarray = field(init=False)
    index_of: np.ndarray = field(init=False)

    def __post_init__(self):
        up_masks = _masks_with_popcount(self.L, self.n_up)
        down_masks = _masks_with_popcount(self.L, self.n_down)
        states = []
        for u in up_masks:
            for d in down_masks:
                states.append(_interleave(u, d, self.L))
        states = np.array(sorted(states), dtype=np.int64)
        index_of = np.full(1 << (2 * self.L), -1, dtype=np.int64)
        index_of[states] = np.arange(states.size)
        self.states = states
        self.index_of = index_of

    @property
    def dimension(self) -> int:
        return int(self.states.size)

    @property
    def n_modes(self) -> int:
        return 2 * self.L

    def to_full(self, vec: np.ndarray) -> np.ndarray:
        full = np.zeros(1 << (2 * self.L), dtype=complex)
        full[self.states] = vec
        return full

    def from_full(self, full: np.ndarray, tol: float = 1e-10) -> np.ndarray:
        vec = full[self.states]
        if abs(np.linalg.norm(full) - np.linalg.norm(vec)) > tol:
            raise ValueError("state has weight outside the sector")
        return vec

    def occupation_index(self, occupied: list[tuple[int, str]]) -> int:
        """Sector index of a product occupation state; entries are
        (site, 'up'|'down'|'both')."""
        mask = 0
        for site, which in occupied:
            if which in ("up", "both"):
                mask |= 1 << (2 * site)
            if which in ("down", "both"):
                mask |= 1 << (2 * site + 1)
        idx = int(self.index_of[mask])
        if idx < 0:
            raise ValueError("occupation pattern not in this sector")
        return idx


def _masks_with_popcount(n_bits: int, count: int) -> list[int]:
    return [
        sum(1 << b for b in bits) for bits in combinations(range(n_bits), count)
    ]


def _interleave(up_mask: int, down_mask: int, L: int) -> int:
    out = 0
    for site in range(L):
        if (up_mask >> site) & 1:
            out |= 1 << (2 * site)
        if (down_mask >> site) & 1:
            out |= 1 << (2 * site + 1)
    return out


def project_to_sector(
    op: OperatorSum, basis: SectorBasis, t: float = 0.0, leak_tol: float = 1e-9,
    sparse: bool = False,
):
    """Sector matrix of a number-conserving operator (dense ndarray, or CSR
    with ``sparse=True`` for large sectors).

    Individual Pauli terms of a JW-mapped hopping operator do leave the
    sector; contributions are accumulated per target state and any net
    leakage above ``leak_tol`` raises.
    """
    import scipy.sparse

    dim = basis.dimension
    leak: dict[tuple[int, int], complex] = {}
    states = basis.states.astype(np.uint64)
    cols = np.arange(dim)
    coo_rows, coo_cols, coo_vals = [], [], []
    for string, coeff in op.coeffs_at(t).items():
        targets_full = (states ^ np.uint64(string.x)).astype(np.int64)
        zpar = np.bitwise_count(states & np.uint64(string.z)).astype(np.int64) & 1
        phase = (1j) ** (bin(string.x & string.z).count("1") % 4)
        amps = coeff * phase * np.where(zpar, -1.0, 1.0)
        rows = basis.index_of[targets_full]
        inside = rows >= 0
        coo_rows.append(rows[inside])
        coo_cols.append(cols[inside])
        coo_vals.append(amps[inside])
        for tf, c, a in zip(targets_full[~inside], cols[~inside], amps[~inside]):
            key = (int(tf), int(c))
            leak[key] = leak.get(key, 0.0) + a
    worst = max((abs(v) for v in leak.values()), default=0.0)
    if worst > leak_tol:
        raise ValueError(
            f"operator does not conserve the sector (leak amplitude {worst:.3e})"
        )
    mat = scipy.sparse.coo_matrix(
        (np.concatenate(coo_vals) if coo_vals else np.array([], dtype=complex),
         (np.concatenate(coo_rows) if coo_rows else np.array([], dtype=np.int64),
          np.concatenate(coo_cols) if coo_cols else np.array([], dtype=np.int64))),
        shape=(dim, dim),
    ).tocsr()
    if mat.nnz == 0 or np.abs(mat.data.imag).max() < 1e-14:
        mat = mat.real
    return mat if sparse else mat.toarray()


def site_qubits(sites) -> list[int]:
    """JW qubit indices carrying the two modes of each listed site."""
    out = []
    for s in sorted(sites):
        out.extend([2 * s, 2 * s + 1])
    return out
