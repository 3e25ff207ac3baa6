"""Exact statevector evolution, propagators, partial traces and entropies.

Constant Hamiltonians are evolved by spectral decomposition; time-dependent
ones by fourth-order commutator-free Magnus stepping with automatic step
halving until the result is converged. Eigendecompositions of large Hamiltonians are cached
in-process because several scenarios share the same matrices.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .operators import OperatorSum

NORM_TOL = 1e-9


@dataclass
class EvolutionConfig:
    dt: float = 0.01
    tol: float = 1e-8
    dt_floor: float = 1e-6
    max_halvings: int = 12


@dataclass
class StateVector:
    """Pure state; ``basis`` is either an int (number of qubits, full basis)
    or a SectorBasis from the fermion module."""

    amplitudes: np.ndarray
    basis: object

    def __post_init__(self):
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state not normalized: |psi| = {norm}")


def _as_array(psi) -> np.ndarray:
    return np.asarray(getattr(psi, "amplitudes", psi), dtype=complex)


# ---------------------------------------------------------------------------
# eigendecomposition cache
# ---------------------------------------------------------------------------

_EIG_CACHE: dict[str, tuple[np.ndarray, np.ndarray]] = {}
_EIG_CACHE_LIMIT = 6


def hermitian_eig(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cached eigendecomposition of a Hermitian matrix."""
    key = hashlib.sha1(np.ascontiguousarray(h).view(np.uint8)).hexdigest()
    hit = _EIG_CACHE.get(key)
    if hit is not None:
        return hit
    if np.linalg.norm(h - h.conj().T) > 1e-9 * max(1.0, np.linalg.norm(h)):
        raise ValueError("matrix is not Hermitian")
    evals, evecs = np.linalg.eigh(h)
    if len(_EIG_CACHE) >= _EIG_CACHE_LIMIT:
        _EIG_CACHE.pop(next(iter(_EIG_CACHE)))
    _EIG_CACHE[key] = (evals, evecs)
    return evals, evecs


def _dense(h, t: float = 0.0) -> np.ndarray:
    if isinstance(h, OperatorSum):
        return h.to_dense(t)
    return np.asarray(h)


# ---------------------------------------------------------------------------
# evolution
# ---------------------------------------------------------------------------


def evolve_const(h, psi, t: float) -> np.ndarray:
    """e^{-iHt} psi via spectral decomposition; H constant Hermitian."""
    vec = _as_array(psi)
    evals, evecs = hermitian_eig(_dense(h))
    out = evecs @ (np.exp(-1j * evals * t) * (evecs.conj().T @ vec))
    return out


def propagator_const(h, t: float) -> np.ndarray:
    evals, evecs = hermitian_eig(_dense(h))
    return (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T


# Gauss nodes and weights of the fourth-order commutator-free Magnus step
_CF4_C1 = 0.5 - math.sqrt(3.0) / 6.0
_CF4_C2 = 0.5 + math.sqrt(3.0) / 6.0
_CF4_A1 = 0.25 - math.sqrt(3.0) / 6.0
_CF4_A2 = 0.25 + math.sqrt(3.0) / 6.0


def _step_td(h: OperatorSum, psi: np.ndarray, t0: float, t1: float, dt: float) -> np.ndarray:
    """Fourth-order commutator-free Magnus stepping (two exponentials per
    step, Hamiltonian sampled at the two Gauss nodes)."""
    n = max(1, int(round((t1 - t0) / dt)))
    step = (t1 - t0) / n
    out = psi
    for k in range(n):
        ta = t0 + k * step
        h1 = h.to_dense(ta + _CF4_C1 * step)
        h2 = h.to_dense(ta + _CF4_C2 * step)
        out = scipy.linalg.expm(-1j * step * (_CF4_A1 * h1 + _CF4_A2 * h2)) @ (
            scipy.linalg.expm(-1j * step * (_CF4_A2 * h1 + _CF4_A1 * h2)) @ out
        )
    return out


def evolve_td(
    h: OperatorSum, psi, t_final: float, cfg: EvolutionConfig | None = None,
    t_start: float = 0.0,
) -> np.ndarray:
    """Time-ordered evolution; halves dt until the result is converged."""
    cfg = cfg or EvolutionConfig()
    vec = _as_array(psi)
    if t_final == t_start:
        return vec.copy()
    if h.is_constant():
        return evolve_const(h, vec, t_final - t_start)
    dt = cfg.dt
    prev = _step_td(h, vec, t_start, t_final, dt)
    for _ in range(cfg.max_halvings):
        dt /= 2.0
        cur = _step_td(h, vec, t_start, t_final, dt)
        if np.linalg.norm(cur - prev) < cfg.tol:
            return cur
        prev = cur
        if dt < cfg.dt_floor:
            break
    raise RuntimeError(
        f"time-ordered evolution did not converge to {cfg.tol} above dt={dt}"
    )


def propagator(h, t: float, cfg: EvolutionConfig | None = None) -> np.ndarray:
    """Dense unitary for evolution up to time t."""
    if not isinstance(h, OperatorSum) or h.is_constant():
        return propagator_const(h, t)
    cfg = cfg or EvolutionConfig()
    dim = h.dim
    eye = np.eye(dim, dtype=complex)
    dt = cfg.dt
    prev = _propagate_matrix(h, eye, t, dt)
    for _ in range(cfg.max_halvings):
        dt /= 2.0
        cur = _propagate_matrix(h, eye, t, dt)
        if np.linalg.norm(cur - prev) < cfg.tol * math.sqrt(dim):
            return cur
        prev = cur
        if dt < cfg.dt_floor:
            break
    raise RuntimeError("propagator stepping did not converge")


def _propagate_matrix(h: OperatorSum, mat: np.ndarray, t: float, dt: float,
                      t0: float = 0.0) -> np.ndarray:
    n = max(1, int(round((t - t0) / dt)))
    step = (t - t0) / n
    out = mat
    for k in range(n):
        ta = t0 + k * step
        h1 = h.to_dense(ta + _CF4_C1 * step)
        h2 = h.to_dense(ta + _CF4_C2 * step)
        out = scipy.linalg.expm(-1j * step * (_CF4_A1 * h1 + _CF4_A2 * h2)) @ (
            scipy.linalg.expm(-1j * step * (_CF4_A2 * h1 + _CF4_A1 * h2)) @ out
        )
    return out


def propagator_table(h, times, cfg: EvolutionConfig | None = None) -> list[np.ndarray]:
    """Unitaries U(t_k) for a sorted list of times starting at 0, with the
    same step-halving convergence policy as ``propagator``."""
    times = list(times)
    if times[0] != 0.0 or any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("times must start at 0 and increase strictly")
    if not isinstance(h, OperatorSum) or h.is_constant():
        return [propagator_const(h, t) for t in times]
    cfg = cfg or EvolutionConfig()
    eye = np.eye(h.dim, dtype=complex)

    def table(dt: float) -> list[np.ndarray]:
        out = [eye]
        for a, b in zip(times, times[1:]):
            out.append(_propagate_matrix(h, out[-1], b, dt, t0=a))
        return out

    dt = cfg.dt
    prev = table(dt)
    for _ in range(cfg.max_halvings):
        dt /= 2.0
        cur = table(dt)
        if np.linalg.norm(cur[-1] - prev[-1]) < cfg.tol * math.sqrt(h.dim):
            return cur
        prev = cur
        if dt < cfg.dt_floor:
            break
    raise RuntimeError("propagator table stepping did not converge")


# ---------------------------------------------------------------------------
# reduced states and entropies
# ---------------------------------------------------------------------------


def reduced_density(psi, keep, n_qubits: int | None = None) -> np.ndarray:
    """Reduced density matrix on the kept qubits of a full-basis pure state.

    Qubit 0 is the least significant bit of the basis index; the row/column
    ordering of the output follows the sorted kept indices, least significant
    first.
    """
    vec = _as_array(psi)
    if n_qubits is None:
        n_qubits = int(round(math.log2(vec.size)))
    if vec.size != 1 << n_qubits:
        raise ValueError("state length is not 2**n_qubits")
    keep = sorted(keep)
    if any(q < 0 or q >= n_qubits for q in keep):
        raise ValueError("kept qubit outside register")
    # tensor axes are ordered most-significant first after reshape
    tensor = vec.reshape((2,) * n_qubits)
    axes_keep = [n_qubits - 1 - q for q in reversed(keep)]
    axes_rest = [a for a in range(n_qubits) if a not in axes_keep]
    perm = axes_keep + axes_rest
    a = np.transpose(tensor, perm).reshape(1 << len(keep), -1)
    return a @ a.conj().T


def entropy(rho: np.ndarray, units: str = "nats") -> float:
    """Von Neumann entropy of a density matrix; eigenvalues below 1e-12 are
    treated as exact zeros, negativity beyond -1e-10 is an error."""
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -1e-10:
        raise ValueError(f"density matrix has negative eigenvalue {evals.min()}")
    evals = np.clip(evals, 0.0, None)
    evals = evals[evals > 1e-12]
    s = float(-np.sum(evals * np.log(evals)))
    s = max(s, 0.0)
    if units == "nats":
        return s
    if units == "bits":
        return s / math.log(2.0)
    raise ValueError(f"unknown units {units!r}")


def subsystem_entropy(psi, keep, n_qubits: int | None = None, units: str = "nats") -> float:
    return entropy(reduced_density(psi, keep, n_qubits), units)


def basis_state(n_qubits: int, index: int = 0) -> np.ndarray:
    psi = np.zeros(1 << n_qubits, dtype=complex)
    psi[index] = 1.0
    return psi


def plus_state(n_qubits: int) -> np.ndarray:
    d = 1 << n_qubits
    return np.full(d, 1.0 / math.sqrt(d), dtype=complex)


def haar_state(n_qubits: int, rng: np.random.Generator) -> np.ndarray:
    d = 1 << n_qubits
    vec = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return vec / np.linalg.norm(vec)
