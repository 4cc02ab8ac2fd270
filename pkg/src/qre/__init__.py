"""Resource estimation for ground-state energy algorithms on small Pauli Hamiltonians."""

from .pauli import (
    DimensionError,
    FermionTerm,
    PauliSum,
    PauliTerm,
    PauliWord,
    commutes,
    jordan_wigner,
    multiply,
    qubit_wise_commutes,
)
from .hamlib import (
    CapabilityError,
    HubbardSpec,
    ParseError,
    SpectralInfo,
    build_hubbard,
    dense_spectrum,
    hubbard,
    load_pauli_file,
    norm_upper_bound,
    save_pauli_file,
)
from .grouping import (
    MeasurementGroups,
    ShotEstimate,
    estimate_shots,
    maximally_mixed_shot_bound,
    sorted_insertion_group,
)
from .circuit import (
    Circuit,
    CouplingGraph,
    Gate,
    GateCount,
    controlled_trotter_cost,
    count_gates,
    heavy_hex,
    route,
    synth_pauli_exponential,
    synth_trotter_step,
)
from .sim import StateVector, apply_circuit, exact_evolve, expectation, pauli_expectation, prepare_overlap_state
from .krylov import (
    KrylovMatrices,
    KrylovScan,
    Threshold,
    assemble_matrices,
    build_subspace,
    convergence_scan,
    epperly_bound,
    krylov_resources,
    linear_extrapolate,
    solve_gevp,
)
from .qpe import QpeBoundReport, qpe_plan, v2_bound, v2_exact
from .adapt import AdaptState, PoolOperator, adapt_run, ansatz_gate_count, build_qe_pool, operator_gradient
from .report import ResourceReport

__version__ = "0.1.0"
