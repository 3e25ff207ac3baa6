"""Numerical laboratory for perturbed quantum many-body dynamics and a
certified hierarchy of dynamical error bounds."""

from .operators import (
    CONSTANT,
    Cosine,
    OperatorSum,
    PauliString,
    RcpEnvelope,
    Sine,
    parse_operator,
    pauli_mul,
)
from .dynamics import (
    EvolutionConfig,
    StateVector,
    basis_state,
    entropy,
    evolve_const,
    evolve_td,
    haar_state,
    plus_state,
    propagator,
    reduced_density,
    subsystem_entropy,
)
from .fermion import (
    FermionMode,
    SectorBasis,
    build_hubbard,
    build_hubbard_2d,
    hubbard_perturbation,
    jw_operator,
    number_operator,
    project_to_sector,
)
from .perturbation import (
    PerturbationModel,
    PerturbationRealization,
    build_qimf_1d,
    build_qimf_2d,
    sample,
    standard_qimf_noise,
)
from .bounds import (
    BoundReport,
    TimeGrid,
    Trajectory,
    baseline_bounds,
    bound_ladder,
    certify_lemma,
    coherent_error_bound,
    disorder_trace_bound,
    ensemble_trace_distance,
    entanglement_bound,
    entanglement_delta,
    estimate_crossover,
    exact_error,
    integral_bound,
    segmented_td_bound,
    split_bound,
)
from .detection import cross_term_expectations, histogram
from .control import (
    ControlScenario,
    GibbsSweep,
    PulseParams,
    build_single_qubit_scenario,
    build_two_qubit_scenario,
    error_distance,
    gate_error_sweep,
    load_pulse_table,
    purified_gibbs,
    rcp_waveform,
)
from .scenarios import RunManifest, ScenarioConfig, list_scenarios, run_scenario

__all__ = [name for name in dir() if not name.startswith("_")]
