"""Pauli-string operator algebra and dense realization.

Pauli strings are stored as a pair of bitmasks (x, z) with the convention

    P = i^{|x & z|} X^x Z^z

so that (1,0) -> X, (0,1) -> Z, (1,1) -> Y and every string is Hermitian.
Site 0 is the least significant qubit (little-endian); dense matrices and
partial traces elsewhere in the package rely on this ordering.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

AXES = "XYZ"

#: default cap on dense realizations, in qubits
DENSE_CAP = 14


class DenseCapExceeded(ValueError):
    """Raised when a dense realization would exceed the qubit cap."""


def _popcount(n: int) -> int:
    return bin(n).count("1")


@dataclass(frozen=True, order=True)
class PauliString:
    """A product of single-site Pauli factors, identity if both masks are 0."""

    x: int = 0
    z: int = 0

    @classmethod
    def from_factors(cls, factors: Iterable[tuple[int, str]]) -> "PauliString":
        x = z = 0
        last = -1
        for site, axis in factors:
            if site <= last:
                raise ValueError("site indices must be strictly increasing")
            last = site
            if axis in ("X", "Y"):
                x |= 1 << site
            if axis in ("Z", "Y"):
                z |= 1 << site
            if axis not in AXES:
                raise ValueError(f"unknown Pauli axis {axis!r}")
        return cls(x, z)

    @property
    def factors(self) -> list[tuple[int, str]]:
        out = []
        mask = self.x | self.z
        site = 0
        while mask >> site:
            bx = (self.x >> site) & 1
            bz = (self.z >> site) & 1
            if bx or bz:
                out.append((site, "Y" if bx and bz else ("X" if bx else "Z")))
            site += 1
        return out

    @property
    def support(self) -> frozenset[int]:
        return frozenset(site for site, _ in self.factors)

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def __str__(self) -> str:
        if self.is_identity():
            return "I"
        return " ".join(f"{axis}{site}" for site, axis in self.factors)


IDENTITY = PauliString()


def pauli_mul(p: PauliString, q: PauliString) -> tuple[complex, PauliString]:
    """Multiply two Pauli strings; returns (phase, product) with
    phase * product equal to the matrix product p @ q."""
    x = p.x ^ q.x
    z = p.z ^ q.z
    # i-exponent from the i^{|x&z|} normalization of each string plus the
    # anticommutation sign from commuting Z^{z_p} past X^{x_q}
    k = _popcount(p.x & p.z) + _popcount(q.x & q.z) - _popcount(x & z)
    k += 2 * _popcount(p.z & q.x)
    return (1j) ** (k % 4), PauliString(x, z)


def paulis_commute(p: PauliString, q: PauliString) -> bool:
    return (_popcount(p.x & q.z) + _popcount(p.z & q.x)) % 2 == 0


# ---------------------------------------------------------------------------
# coefficient envelopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Envelope:
    """Real-valued time envelope multiplying a term's coefficient."""

    def value(self, t: float) -> float:
        raise NotImplementedError

    def is_constant(self) -> bool:
        return False


@dataclass(frozen=True)
class Constant(Envelope):
    def value(self, t: float) -> float:
        return 1.0

    def is_constant(self) -> bool:
        return True


@dataclass(frozen=True)
class Cosine(Envelope):
    omega: float
    phi: float = 0.0

    def value(self, t: float) -> float:
        return math.cos(self.omega * t + self.phi)


@dataclass(frozen=True)
class Sine(Envelope):
    omega: float
    phi: float = 0.0

    def value(self, t: float) -> float:
        return math.sin(self.omega * t + self.phi)


@dataclass(frozen=True)
class RcpEnvelope(Envelope):
    """Sine-windowed Fourier control pulse; evaluates the full waveform
    amplitude(t), zero at t=0 and t=T."""

    omega_m: float
    duration: float
    a: tuple[float, ...]
    phi: tuple[float, ...]

    def value(self, t: float) -> float:
        if t < 0.0 or t > self.duration:
            raise ValueError(f"t={t} outside pulse window [0, {self.duration}]")
        w = math.pi * t / self.duration
        series = self.a[0]
        for j, (aj, pj) in enumerate(zip(self.a[1:], self.phi), start=1):
            series += aj * math.cos(2.0 * math.pi * j * t / self.duration + pj)
        return self.omega_m * math.sin(w) * series


@dataclass(frozen=True)
class Product(Envelope):
    """Pointwise product of envelopes (used for modulated pulse terms)."""

    parts: tuple[Envelope, ...]

    def value(self, t: float) -> float:
        out = 1.0
        for p in self.parts:
            out *= p.value(t)
        return out

    def is_constant(self) -> bool:
        return all(p.is_constant() for p in self.parts)


CONSTANT = Constant()


# ---------------------------------------------------------------------------
# operator sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OperatorSum:
    """A sum of coefficient * envelope(t) * PauliString terms on n_sites qubits."""

    n_sites: int
    terms: tuple[tuple[complex, Envelope, PauliString], ...] = ()

    def __post_init__(self):
        top = (1 << self.n_sites) - 1
        for _, _, string in self.terms:
            if (string.x | string.z) & ~top:
                raise ValueError("Pauli factor outside the declared site range")

    @classmethod
    def from_terms(
        cls,
        n_sites: int,
        terms: Iterable[tuple[complex, PauliString] | tuple[complex, Envelope, PauliString]],
    ) -> "OperatorSum":
        normed = []
        for term in terms:
            if len(term) == 2:
                coeff, string = term  # type: ignore[misc]
                env: Envelope = CONSTANT
            else:
                coeff, env, string = term  # type: ignore[misc]
            if coeff != 0:
                normed.append((complex(coeff), env, string))
        return cls(n_sites, tuple(normed))

    # -- structure ---------------------------------------------------------

    @property
    def dim(self) -> int:
        return 1 << self.n_sites

    def is_constant(self) -> bool:
        return all(env.is_constant() for _, env, _ in self.terms)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c in self.coeffs_at(0.0).values())

    def support(self) -> frozenset[int]:
        out: frozenset[int] = frozenset()
        for coeff, _, string in self.terms:
            if coeff != 0:
                out |= string.support
        return out

    def term_supports(self) -> list[frozenset[int]]:
        return [string.support for _, _, string in self.terms]

    def coeffs_at(self, t: float = 0.0) -> dict[PauliString, complex]:
        """Merged coefficient per canonical Pauli string at time t."""
        out: dict[PauliString, complex] = {}
        for coeff, env, string in self.terms:
            c = coeff * env.value(t)
            if c != 0:
                out[string] = out.get(string, 0.0) + c
        return {s: c for s, c in out.items() if c != 0}

    def simplify(self) -> "OperatorSum":
        """Merge constant-envelope duplicates; time-dependent terms kept as is."""
        const: dict[PauliString, complex] = {}
        rest = []
        for coeff, env, string in self.terms:
            if env.is_constant():
                const[string] = const.get(string, 0.0) + coeff * env.value(0.0)
            else:
                rest.append((coeff, env, string))
        merged = [(c, CONSTANT, s) for s, c in const.items() if c != 0]
        return OperatorSum(self.n_sites, tuple(merged + rest))

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "OperatorSum") -> "OperatorSum":
        if other.n_sites != self.n_sites:
            raise ValueError("site count mismatch")
        return OperatorSum(self.n_sites, self.terms + other.terms)

    def __mul__(self, scalar: complex) -> "OperatorSum":
        return OperatorSum(
            self.n_sites,
            tuple((coeff * scalar, env, string) for coeff, env, string in self.terms),
        )

    __rmul__ = __mul__

    # -- dense realization --------------------------------------------------

    def to_dense(self, t: float = 0.0, cap: int = DENSE_CAP) -> np.ndarray:
        if self.n_sites > cap:
            raise DenseCapExceeded(
                f"{self.n_sites} sites exceeds the dense cap of {cap}"
            )
        d = self.dim
        mat = np.zeros((d, d), dtype=complex)
        idx = np.arange(d)
        for string, coeff in self.coeffs_at(t).items():
            rows, amps = pauli_action(string, self.n_sites)
            mat[rows, idx] += coeff * amps
        return mat

    def apply(self, psi: np.ndarray, t: float = 0.0) -> np.ndarray:
        """Apply the operator to a full-basis state vector without forming
        the dense matrix."""
        out = np.zeros_like(psi, dtype=complex)
        for string, coeff in self.coeffs_at(t).items():
            rows, amps = pauli_action(string, self.n_sites)
            out[rows] += (coeff * amps) * psi
        return out

    def expectation(self, psi: np.ndarray, t: float = 0.0) -> complex:
        return np.vdot(psi, self.apply(psi, t))


def pauli_action(string: PauliString, n_sites: int) -> tuple[np.ndarray, np.ndarray]:
    """Column action of a Pauli string: P|i> = amps[i] |rows[i]>."""
    d = 1 << n_sites
    idx = np.arange(d, dtype=np.uint64)
    rows = (idx ^ np.uint64(string.x)).astype(np.int64)
    zpar = np.bitwise_count(idx & np.uint64(string.z)).astype(np.int64) & 1
    phase = (1j) ** (_popcount(string.x & string.z) % 4)
    amps = phase * np.where(zpar, -1.0, 1.0).astype(complex)
    return rows, amps


def pauli_dense(string: PauliString, n_sites: int) -> np.ndarray:
    d = 1 << n_sites
    mat = np.zeros((d, d), dtype=complex)
    rows, amps = pauli_action(string, n_sites)
    mat[rows, np.arange(d)] = amps
    return mat


def operator_norms(
    op: OperatorSum, t: float = 0.0, cap: int = DENSE_CAP
) -> tuple[float, float]:
    """(spectral, normalized Frobenius) at time t.

    The normalized Frobenius norm sqrt(Tr(X^dag X)/d) follows from the
    orthonormality of Pauli strings under the normalized Hilbert-Schmidt
    inner product; the spectral norm is the largest singular value of the
    dense realization.
    """
    coeffs = op.coeffs_at(t)
    frobenius = math.sqrt(sum(abs(c) ** 2 for c in coeffs.values()))
    if not coeffs:
        return 0.0, 0.0
    if op.n_sites > cap:
        raise DenseCapExceeded(f"{op.n_sites} sites exceeds the dense cap of {cap}")
    mat = op.to_dense(t, cap=cap)
    if op.is_hermitian():
        spectral = float(np.max(np.abs(np.linalg.eigvalsh(mat))))
    else:
        spectral = float(np.linalg.norm(mat, 2))
    return spectral, frobenius


def frobenius_norm(op: OperatorSum, t: float = 0.0) -> float:
    """Normalized Frobenius norm from merged Pauli coefficients (no dense)."""
    return math.sqrt(sum(abs(c) ** 2 for c in op.coeffs_at(t).values()))


def diagonal_values(op: OperatorSum, t: float = 0.0) -> np.ndarray:
    """Full-space diagonal of an operator whose terms are all Z-type.

    Usable beyond the dense cap since only the diagonal is materialized.
    """
    d = op.dim
    idx = np.arange(d, dtype=np.uint64)
    diag = np.zeros(d, dtype=complex)
    for string, coeff in op.coeffs_at(t).items():
        if string.x != 0:
            raise ValueError("operator has off-diagonal (X/Y) factors")
        zpar = np.bitwise_count(idx & np.uint64(string.z)).astype(np.int64) & 1
        diag += coeff * np.where(zpar, -1.0, 1.0)
    return diag


def product_terms(
    a: dict[PauliString, complex], b: dict[PauliString, complex]
) -> dict[PauliString, complex]:
    """Merged Pauli expansion of (sum a) @ (sum b)."""
    out: dict[PauliString, complex] = {}
    for p, cp in a.items():
        for q, cq in b.items():
            phase, r = pauli_mul(p, q)
            c = cp * cq * phase
            if c != 0:
                out[r] = out.get(r, 0.0) + c
    return {s: c for s, c in out.items() if abs(c) > 0}


def dagger_coeffs(a: dict[PauliString, complex]) -> dict[PauliString, complex]:
    return {s: c.conjugate() for s, c in a.items()}


# ---------------------------------------------------------------------------
# text grammar
# ---------------------------------------------------------------------------
#
# operator  := term ('+' term)*            newlines also separate terms
# term      := [coeff '*'] factors ['@' envelope]
# factors   := 'I' | (axis digit+)+        e.g. "X0 X1", "Z3"
# envelope  := 'cos(w=<f>, phi=<f>)' | 'sin(w=<f>, phi=<f>)'
#              | 'rcp(omega_m=<f>, T=<f>, a=[...], phi=[...])'
#
# coeff is any Python float literal ("0.01", "-1e-3", ...).

_FACTOR_RE = re.compile(r"([XYZ])(\d+)")
_ENV_RE = re.compile(r"@\s*(\w+)\s*\((.*)\)\s*$")


def _parse_env(name: str, body: str) -> Envelope:
    def fval(key: str) -> float:
        m = re.search(rf"{key}\s*=\s*([-+0-9.eE]+)", body)
        if m is None:
            raise ValueError(f"envelope {name} missing parameter {key}")
        return float(m.group(1))

    def flist(key: str) -> tuple[float, ...]:
        m = re.search(rf"{key}\s*=\s*\[([^\]]*)\]", body)
        if m is None:
            raise ValueError(f"envelope {name} missing list parameter {key}")
        return tuple(float(v) for v in m.group(1).split(",") if v.strip())

    if name == "cos":
        return Cosine(fval("w"), fval("phi"))
    if name == "sin":
        return Sine(fval("w"), fval("phi"))
    if name == "rcp":
        return RcpEnvelope(fval("omega_m"), fval("T"), flist("a"), flist("phi"))
    raise ValueError(f"unknown envelope kind {name!r}")


def parse_operator(text: str, n_sites: int) -> OperatorSum:
    """Parse an operator literal such as ``0.01 * X0 X1 + 0.5 * Z2``."""
    terms = []
    chunks = [c.strip() for c in re.split(r"[+\n]", text) if c.strip()]
    for chunk in chunks:
        env: Envelope = CONSTANT
        m = _ENV_RE.search(chunk)
        if m:
            env = _parse_env(m.group(1), m.group(2))
            chunk = chunk[: m.start()].strip()
        if "*" in chunk:
            coeff_text, _, factor_text = chunk.partition("*")
            coeff = complex(coeff_text.strip().replace("i", "j"))
        else:
            coeff, factor_text = 1.0 + 0j, chunk
        factor_text = factor_text.strip()
        if factor_text == "I":
            string = IDENTITY
        else:
            factors = _FACTOR_RE.findall(factor_text)
            leftover = _FACTOR_RE.sub("", factor_text).strip()
            if not factors or leftover:
                raise ValueError(f"cannot parse factors in term {chunk!r}")
            pairs = sorted((int(site), axis) for axis, site in factors)
            string = PauliString.from_factors(pairs)
        terms.append((coeff, env, string))
    return OperatorSum.from_terms(n_sites, terms)
