"""The dynamical-error metric and the full ladder of upper bounds.

Every bound integrates quantities along the *ideal* trajectory (the state
evolved under the unperturbed Hamiltonian); the exact error is the only
quantity that touches the perturbed propagator. Quadrature is trapezoidal
on the scenario grid with midpoint refinement until successive refinements
agree to a relative tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .dynamics import (
    EvolutionConfig,
    entropy,
    evolve_const,
    haar_state,
    hermitian_eig,
    reduced_density,
    _as_array,
    _dense,
)
from .operators import (
    OperatorSum,
    PauliString,
    dagger_coeffs,
    frobenius_norm,
    operator_norms,
    product_terms,
)
from .perturbation import PerturbationModel, sample

LN2 = math.log(2.0)
QUAD_REL_TOL = 1e-4


@dataclass
class TimeGrid:
    points: np.ndarray
    rule: str = "trapezoid"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.size < 2 or pts[0] != 0.0 or np.any(np.diff(pts) <= 0):
            raise ValueError("grid must start at 0 with strictly increasing points")
        if self.rule not in ("trapezoid", "midpoint"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        self.points = pts

    @classmethod
    def regular(cls, t_final: float, n_points: int) -> "TimeGrid":
        return cls(np.linspace(0.0, t_final, n_points))

    def refined(self) -> "TimeGrid":
        pts = self.points
        mids = 0.5 * (pts[:-1] + pts[1:])
        return TimeGrid(np.sort(np.concatenate([pts, mids])), self.rule)

    @property
    def t_final(self) -> float:
        return float(self.points[-1])


def _cumtrapz(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x))
    return out


def _restrict(values: np.ndarray, fine: np.ndarray, coarse: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(fine, coarse)
    return values[idx]


# ---------------------------------------------------------------------------
# ideal trajectories
# ---------------------------------------------------------------------------


class Trajectory:
    """Lazily evaluated evolution of one state under one Hamiltonian.

    ``lift`` maps the evolved vector into the full qubit basis (identity for
    spin systems, sector reconstruction for fermions) and is only invoked for
    entropy evaluations.
    """

    def __init__(self, h, psi0, cfg: EvolutionConfig | None = None, lift=None):
        import scipy.sparse

        self.h = h
        self.psi0 = _as_array(psi0)
        self.cfg = cfg or EvolutionConfig()
        self.lift = lift
        self._cache: dict[float, np.ndarray] = {}
        self._lift_cache: dict[float, np.ndarray] = {}
        self.sparse = scipy.sparse.issparse(h)
        self.constant = self.sparse or not (
            isinstance(h, OperatorSum) and not h.is_constant()
        )
        if self.sparse:
            # large sector Hamiltonians: Krylov stepping, no eigendecomposition
            self._gen = (-1j) * h.tocsr().astype(complex)
        elif self.constant:
            self._evals, self._evecs = hermitian_eig(_dense(h))
            self._psi_e = self._evecs.conj().T @ self.psi0

    def state(self, t: float) -> np.ndarray:
        hit = self._cache.get(t)
        if hit is not None:
            return hit
        if self.sparse:
            out = self._sparse_state(t)
        elif self.constant:
            out = self._evecs @ (np.exp(-1j * self._evals * t) * self._psi_e)
        else:
            out = self._td_state(t)
        self._cache[t] = out
        return out

    def _nearest_prior(self, t: float) -> tuple[float, np.ndarray]:
        prior = [s for s in self._cache if s <= t]
        t0 = max(prior) if prior else 0.0
        return t0, self._cache.get(t0, self.psi0)

    def _sparse_state(self, t: float) -> np.ndarray:
        from scipy.sparse.linalg import expm_multiply

        t0, psi = self._nearest_prior(t)
        if t == t0:
            return psi.copy()
        return expm_multiply((t - t0) * self._gen, psi)

    def _td_state(self, t: float) -> np.ndarray:
        t0, psi = self._nearest_prior(t)
        if t == t0:
            return psi.copy()
        from .dynamics import evolve_td

        return evolve_td(self.h, psi, t, self.cfg, t_start=t0)

    def lifted(self, t: float) -> np.ndarray:
        if self.lift is None:
            return self.state(t)
        hit = self._lift_cache.get(t)
        if hit is None:
            hit = self.lift(self.state(t))
            self._lift_cache[t] = hit
        return hit


# ---------------------------------------------------------------------------
# exact error
# ---------------------------------------------------------------------------


def exact_error(u0: np.ndarray, u: np.ndarray, psi) -> float:
    vec = _as_array(psi)
    return float(np.linalg.norm((u0 - u) @ vec))


def exact_error_curve(h0, h_pert, psi0, grid: TimeGrid,
                      cfg: EvolutionConfig | None = None) -> np.ndarray:
    """||(U0(t) - U(t)) psi0|| at every grid point; H' = H0 + H_pert."""
    vec = _as_array(psi0)
    if isinstance(h0, OperatorSum) and isinstance(h_pert, OperatorSum):
        h1 = h0 + h_pert
    else:
        h1 = _dense(h0) + _dense(h_pert)
    ideal = Trajectory(h0, vec, cfg)
    noisy = Trajectory(h1, vec, cfg)
    return np.array(
        [np.linalg.norm(ideal.state(t) - noisy.state(t)) for t in grid.points]
    )


# ---------------------------------------------------------------------------
# integrand helpers
# ---------------------------------------------------------------------------


def _pert_apply(h_pert, t: float, psi: np.ndarray) -> np.ndarray:
    if isinstance(h_pert, OperatorSum):
        return h_pert.apply(psi, t)
    return _dense(h_pert) @ psi


def pert_norm_on_state(h_pert, t: float, psi: np.ndarray) -> float:
    """sqrt(<psi| H_pert(t)^dag H_pert(t) |psi>)."""
    return float(np.linalg.norm(_pert_apply(h_pert, t, psi)))


def _adaptive_curve(integrand, grid: TimeGrid, rel_tol: float = QUAD_REL_TOL,
                    max_refine: int = 6) -> np.ndarray:
    """Cumulative trapezoid of ``integrand(t)`` with midpoint refinement;
    result reported on the original grid points."""
    g = grid
    vals = np.array([integrand(t) for t in g.points])
    cum = _cumtrapz(vals, g.points)
    total = cum[-1]
    for _ in range(max_refine):
        g2 = g.refined()
        vals2 = np.array([integrand(t) for t in g2.points])
        cum2 = _cumtrapz(vals2, g2.points)
        if abs(cum2[-1] - total) <= rel_tol * max(abs(total), 1e-30):
            return _restrict(cum2, g2.points, grid.points)
        g, cum, total = g2, cum2, cum2[-1]
    raise RuntimeError("quadrature did not converge under grid refinement")


# ---------------------------------------------------------------------------
# integral bound (Hamiltonian-mismatch quadrature)
# ---------------------------------------------------------------------------


def integral_bound(h_pert, traj: Trajectory, grid: TimeGrid,
                   rel_tol: float = QUAD_REL_TOL) -> np.ndarray:
    """Quadrature of ||H_pert(tau) psi(tau)|| along the ideal trajectory;
    returns the cumulative bound at every grid point."""
    return _adaptive_curve(
        lambda t: pert_norm_on_state(h_pert, t, traj.lifted(t)), grid, rel_tol
    )


# ---------------------------------------------------------------------------
# entanglement lemma
# ---------------------------------------------------------------------------


def cross_expansion(h_pert: OperatorSum, t: float = 0.0) -> dict[PauliString, complex]:
    """Merged Pauli expansion of H_pert(t)^dag H_pert(t)."""
    c = h_pert.coeffs_at(t)
    return product_terms(dagger_coeffs(c), c)


def entanglement_delta(
    products: dict[PauliString, complex], psi: np.ndarray,
    n_sites: int | None = None, entropy_cache: dict | None = None,
) -> tuple[float, float]:
    """(Tr(A)/d, Delta) for a PSD operator given by its merged Pauli terms.

    Delta sums |coeff| * sqrt(max(0, 2 ln d_supp - 2 S(rho_supp))) over the
    non-identity terms, entropies in nats.
    """
    trace_part = 0.0
    delta = 0.0
    cache = entropy_cache if entropy_cache is not None else {}
    for string, coeff in products.items():
        if string.is_identity():
            trace_part += coeff.real
            continue
        supp = string.support
        s = cache.get(supp)
        if s is None:
            s = entropy(reduced_density(psi, supp, n_sites), "nats")
            cache[supp] = s
        radicand = max(0.0, 2.0 * len(supp) * LN2 - 2.0 * s)
        delta += abs(coeff) * math.sqrt(radicand)
    return trace_part, delta


def delta_on_state(h_pert: OperatorSum, psi: np.ndarray, t: float = 0.0) -> float:
    _, d = entanglement_delta(cross_expansion(h_pert, t), psi)
    return d


def entanglement_bound(
    h_pert: OperatorSum, traj: Trajectory, grid: TimeGrid,
    rel_tol: float = QUAD_REL_TOL,
) -> np.ndarray:
    """t ||H_pert||_F + integral of sqrt(Delta) along the ideal trajectory
    (time-independent perturbation)."""
    if not h_pert.is_constant():
        raise ValueError("use segmented_td_bound for time-dependent perturbations")
    products = cross_expansion(h_pert)
    fro = frobenius_norm(h_pert)
    caches: dict[float, dict] = {}

    def integrand(t: float) -> float:
        cache = caches.setdefault(t, {})
        _, d = entanglement_delta(products, traj.lifted(t), None, cache)
        return math.sqrt(d)

    tail = _adaptive_curve(integrand, grid, rel_tol)
    return fro * grid.points + tail


def split_bound(
    h_pert: OperatorSum, traj: Trajectory, grid: TimeGrid, c: float,
    rel_tol: float = QUAD_REL_TOL,
) -> np.ndarray:
    """Integral bound up to the crossover time c, Frobenius slope afterwards."""
    if not 0.0 <= c <= grid.t_final:
        raise ValueError("crossover outside the grid")
    fro = frobenius_norm(h_pert)
    integrand = lambda t: pert_norm_on_state(h_pert, t, traj.lifted(t))
    if c == 0.0:
        return fro * grid.points
    head_pts = np.unique(np.append(grid.points[grid.points <= c], c))
    head = _adaptive_curve(integrand, TimeGrid(head_pts), rel_tol)
    out = np.empty_like(grid.points)
    inside = grid.points <= c
    out[inside] = _restrict(head, head_pts, grid.points[inside])
    out[~inside] = head[-1] + (grid.points[~inside] - c) * fro
    return out


def estimate_crossover(
    h_pert: OperatorSum, traj: Trajectory, grid: TimeGrid, rel_tol: float = 0.05
) -> float:
    """Time at which <H^dag H> on the trajectory settles onto the Frobenius
    plateau ||H_pert||_F^2.

    The curve is smoothed over five grid points; if its late-time mean is off
    the plateau by more than rel_tol the state never saturates and t_final is
    returned. Otherwise the estimate is the first time after the dominant
    early transient at which the deviation drops into the late-time
    fluctuation band max(rel_tol, rms of the second half).
    """
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    fro2 = frobenius_norm(h_pert) ** 2
    if fro2 == 0.0:
        return 0.0
    vals = np.array(
        [pert_norm_on_state(h_pert, t, traj.lifted(t)) ** 2 for t in grid.points]
    )
    kernel = np.ones(min(5, vals.size))
    smooth = np.convolve(vals, kernel, "same") / np.convolve(
        np.ones_like(vals), kernel, "same"
    )
    rel = (smooth - fro2) / fro2
    late = rel[rel.size // 2 :]
    if abs(late.mean()) > rel_tol:
        return grid.t_final
    band = max(rel_tol, float(np.sqrt(np.mean(late**2))))
    peak = int(np.argmax(np.abs(rel[: max(1, rel.size // 2)])))
    for i in range(peak, rel.size):
        if abs(rel[i]) <= band:
            return float(grid.points[i])
    return grid.t_final


def baseline_bounds(h_pert: OperatorSum, t: float) -> tuple[float, float]:
    """(haar, worst) = (t ||H||_F, t ||H||) for a constant perturbation."""
    if not h_pert.is_constant():
        raise ValueError("baselines require a time-independent perturbation")
    spectral, fro = operator_norms(h_pert)
    return t * fro, t * spectral


# ---------------------------------------------------------------------------
# segmented time-dependent bound
# ---------------------------------------------------------------------------


def segmented_td_bound(
    h_pert: OperatorSum, traj: Trajectory, grid: TimeGrid, n_segments: int,
    rel_tol: float = QUAD_REL_TOL,
) -> float:
    """Sum over segments of sqrt(dt * integral of ||H_pert(tau)||_F^2) plus
    the integral of sqrt(Delta(tau)); equals the time-independent
    entanglement bound when the envelopes are constant."""
    if n_segments < 1:
        raise ValueError("need at least one segment")
    t_final = grid.t_final
    dt = t_final / n_segments
    total = 0.0
    for j in range(n_segments):
        seg = TimeGrid(np.linspace(0.0, dt, 9))
        a = j * dt
        fro2_int = _adaptive_curve(
            lambda s: frobenius_norm(h_pert, a + s) ** 2, seg, rel_tol
        )[-1]
        total += math.sqrt(dt * fro2_int)

    caches: dict[float, dict] = {}

    def delta_integrand(t: float) -> float:
        cache = caches.setdefault(t, {})
        products = cross_expansion(h_pert, t)
        _, d = entanglement_delta(products, traj.lifted(t), None, cache)
        return math.sqrt(d)

    tail = _adaptive_curve(delta_integrand, grid, rel_tol)[-1]
    return total + tail


# ---------------------------------------------------------------------------
# disorder ensemble bounds
# ---------------------------------------------------------------------------


def disorder_trace_bound(
    model: PerturbationModel, traj: Trajectory, grid: TimeGrid,
    rel_tol: float = QUAD_REL_TOL,
) -> np.ndarray:
    """2t sqrt(sum sigma_k^2) + 2 integral ||N psi(tau)|| with N the static
    imperfection operator; disorder channels must be single Pauli strings."""
    for op, _ in model.disorder:
        coeffs = op.coeffs_at(0.0)
        if len(coeffs) != 1 or any(s.is_identity() for s in coeffs):
            raise ValueError("disorder channels must be single Pauli strings")
    var_sum = sum(sigma**2 for _, sigma in model.disorder)
    n_op = model.imperfection_operator()
    if n_op.terms:
        imp = _adaptive_curve(
            lambda t: pert_norm_on_state(n_op, t, traj.lifted(t)), grid, rel_tol
        )
    else:
        imp = np.zeros_like(grid.points)
    return 2.0 * grid.points * math.sqrt(var_sum) + 2.0 * imp


def ensemble_trace_distance(
    h0, model: PerturbationModel, psi0, t: float, n_samples: int, seed: int,
    n_bootstrap: int = 100,
) -> tuple[float, float]:
    """Monte-Carlo trace distance ||rho0 - mean_s U_s |psi><psi| U_s^dag||_1
    with ||A||_1 = Tr sqrt(A^dag A); bootstrap standard error attached."""
    if n_samples < 2:
        raise ValueError("need at least 2 samples")
    vec = _as_array(psi0)
    ideal = evolve_const(h0, vec, t)
    rho0 = np.outer(ideal, ideal.conj())
    h0_mat = _dense(h0)
    states = np.empty((n_samples, vec.size), dtype=complex)
    for s in range(n_samples):
        real = sample(model, seed + s)
        h1 = h0_mat + real.h_pert.to_dense()
        evals, evecs = np.linalg.eigh(h1)
        states[s] = evecs @ (np.exp(-1j * evals * t) * (evecs.conj().T @ vec))

    def distance(weights: np.ndarray) -> float:
        rho = (states.conj().T * weights) @ states / weights.sum()
        return float(np.sum(np.abs(np.linalg.eigvalsh(rho0 - rho.T))))

    ones = np.ones(n_samples)
    d = distance(ones)
    rng = np.random.Generator(np.random.Philox(seed ^ 0x5EED))
    boots = np.array(
        [
            distance(np.bincount(rng.integers(0, n_samples, n_samples),
                                 minlength=n_samples).astype(float))
            for _ in range(n_bootstrap)
        ]
    )
    return d, float(boots.std(ddof=1))


def ensemble_rms_error(
    h0, model: PerturbationModel, psi0, t: float, n_samples: int, seed: int,
) -> tuple[float, float]:
    """Root-mean-square state error over disorder realizations with the
    same seeding as ensemble_trace_distance; (rms, stderr of the mean
    square propagated to the rms)."""
    vec = _as_array(psi0)
    ideal = evolve_const(h0, vec, t)
    h0_mat = _dense(h0)
    sq = np.empty(n_samples)
    for s in range(n_samples):
        real = sample(model, seed + s)
        h1 = h0_mat + real.h_pert.to_dense()
        evals, evecs = np.linalg.eigh(h1)
        out = evecs @ (np.exp(-1j * evals * t) * (evecs.conj().T @ vec))
        sq[s] = np.linalg.norm(ideal - out) ** 2
    mean = sq.mean()
    rms = math.sqrt(mean)
    stderr = sq.std(ddof=1) / math.sqrt(n_samples)
    return rms, stderr / (2.0 * rms) if rms > 0 else 0.0


# ---------------------------------------------------------------------------
# coherent circuit error
# ---------------------------------------------------------------------------


def coherent_error_bound(
    u0: np.ndarray, e_op: OperatorSum, lam: float, psi,
) -> tuple[float, float]:
    """Exact ||(U0 e^{-i lam E} - U0) psi|| and its first-order
    entanglement-based bound."""
    vec = _as_array(psi)
    e_dense = e_op.to_dense()
    spectral, _ = operator_norms(e_op)
    if lam * spectral > 0.1:
        import warnings

        warnings.warn("lam * ||E|| > 0.1; first-order bound may be loose")
    err_u = u0 @ scipy.linalg.expm(-1j * lam * e_dense) - u0
    exact = float(np.linalg.norm(err_u @ vec))
    terms = list(e_op.coeffs_at(0.0).items())
    fro = math.sqrt(sum(abs(c) ** 2 for _, c in terms))
    cache: dict = {}
    cross = 0.0
    from .operators import pauli_mul

    for p, cp in terms:
        for q, cq in terms:
            _, r = pauli_mul(p, q)
            if r.is_identity():
                continue
            supp = r.support
            s = cache.get(supp)
            if s is None:
                s = entropy(reduced_density(vec, supp), "nats")
                cache[supp] = s
            radicand = max(0.0, 2.0 * len(supp) * LN2 - 2.0 * s)
            cross += math.sqrt(abs(cp * cq) * math.sqrt(radicand))
    return exact, lam * fro + lam * cross


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class BoundReport:
    """Per-grid-point record of the exact error and the bound ladder."""

    grid: TimeGrid
    columns: dict[str, np.ndarray]
    crossover: float
    metadata: dict = field(default_factory=dict)

    def ladder_violations(self, slack: float = 1e-4) -> list[str]:
        """Ordering failures: exact <= integral <= entanglement (+slack),
        frobenius <= spectral."""
        out = []
        c = self.columns
        t = self.grid.points
        for i in range(len(t)):
            if c["exact_error"][i] > c["integral_bound"][i] + slack:
                out.append(f"t={t[i]:.4g}: exact > integral")
            if c["integral_bound"][i] > c["entanglement_bound"][i] + slack:
                out.append(f"t={t[i]:.4g}: integral > entanglement")
            if c["frobenius_bound"][i] > c["spectral_bound"][i] + slack:
                out.append(f"t={t[i]:.4g}: frobenius > spectral")
        return out


def bound_ladder(
    h0, h_pert: OperatorSum, psi0, grid: TimeGrid,
    lift=None, crossover_rel_tol: float = 0.05,
    sector_spectral: float | None = None, h_noisy=None,
) -> BoundReport:
    """Exact error plus the complete constant-perturbation bound ladder.

    ``h_noisy`` supplies the perturbed generator explicitly (needed when h0
    is a sector matrix); ``sector_spectral`` overrides the dense spectral
    norm when the perturbation lives beyond the dense cap.
    """
    vec = _as_array(psi0)
    traj = Trajectory(h0, vec, lift=lift)
    if h_noisy is not None:
        h1 = h_noisy
    elif isinstance(h0, OperatorSum):
        h1 = (h0 + h_pert).simplify()
    else:
        h1 = _dense(h0) + h_pert.to_dense()
    noisy = Trajectory(h1, vec)
    exact = np.array(
        [np.linalg.norm(traj.state(t) - noisy.state(t)) for t in grid.points]
    )
    integral = integral_bound(h_pert, traj, grid)
    entangle = entanglement_bound(h_pert, traj, grid)
    fro = frobenius_norm(h_pert)
    if sector_spectral is not None:
        spectral = sector_spectral
    else:
        spectral, _ = operator_norms(h_pert)
    c = estimate_crossover(h_pert, traj, grid, crossover_rel_tol)
    split = split_bound(h_pert, traj, grid, c)
    return BoundReport(
        grid,
        {
            "exact_error": exact,
            "integral_bound": integral,
            "entanglement_bound": entangle,
            "frobenius_bound": fro * grid.points,
            "spectral_bound": spectral * grid.points,
            "split_bound": split,
        },
        crossover=c,
    )


def pauli_coefficients(mat: np.ndarray, n_qubits: int) -> dict[PauliString, complex]:
    """Coefficients c_P = Tr(P mat) / d over the full Pauli basis."""
    from .operators import pauli_action

    d = 1 << n_qubits
    if mat.shape != (d, d):
        raise ValueError("matrix shape does not match qubit count")
    idx = np.arange(d)
    out = {}
    for x in range(d):
        for z in range(d):
            string = PauliString(x, z)
            rows, amps = pauli_action(string, n_qubits)
            c = complex(np.sum(amps * mat[idx, rows])) / d
            if c != 0:
                out[string] = c
    return out


@dataclass(frozen=True)
class LemmaTrial:
    n_qubits: int
    expectation: float
    trace_part: float
    delta: float

    @property
    def margin(self) -> float:
        return self.trace_part + self.delta - abs(self.expectation)


def certify_lemma(
    trials: int, seed: int, max_qubits: int = 5, tol: float = 1e-9
) -> list[LemmaTrial]:
    """Random (Haar state, PSD operator) checks of
    |<A>| <= Tr(A)/d + Delta; raises on any violation beyond tol."""
    rng = np.random.Generator(np.random.Philox(seed))
    out = []
    for _ in range(trials):
        n = int(rng.integers(2, max_qubits + 1))
        d = 1 << n
        psi = haar_state(n, rng)
        b = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        a = b.conj().T @ b / d
        expect = float(np.real(np.vdot(psi, a @ psi)))
        coeffs = pauli_coefficients(a, n)
        trace_part, delta = entanglement_delta(coeffs, psi, n)
        trial = LemmaTrial(n, expect, trace_part, delta)
        if trial.margin < -tol:
            raise AssertionError(
                f"operator-expectation lemma violated by {-trial.margin:.3e}"
            )
        out.append(trial)
    return out


def haar_average_expectation(
    h_pert: OperatorSum, n_qubits: int, n_states: int, seed: int
) -> tuple[float, float]:
    """Monte-Carlo mean and stderr of <psi|H^dag H|psi> over Haar states."""
    rng = np.random.Generator(np.random.Philox(seed))
    vals = np.empty(n_states)
    for i in range(n_states):
        psi = haar_state(n_qubits, rng)
        vals[i] = np.linalg.norm(h_pert.apply(psi)) ** 2
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n_states))
