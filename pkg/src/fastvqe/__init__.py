"""Adaptive VQE engine with gradient-based and sampling-based operator selection.

Selection strategies share one loop: ADAPT picks the pool operator with
the largest energy gradient (exact or estimated from finite shots),
while the sampling-based alternatives rank operators from a measured
Slater-determinant population, which needs one shot budget per
iteration instead of one per pool operator.
"""

from .fock import Determinant, ExcitationOperator, OperatorPool, build_pool, hf_determinant
from .hamio import (
    FcidumpConsistencyError,
    FcidumpFormatError,
    MolecularIntegrals,
    SpinOrbitalHamiltonian,
    load_fcidump,
    parse_fcidump,
    resolve_system,
    synth_integrals,
    to_spin_orbitals,
    write_fcidump,
)
from .metrics import gradient_exact, gradient_sampled, hg_alpha, hsci_beta, rank_and_select
from .qubitmap import PauliWord, QubitOperator, jordan_wigner, qeb_generator
from .simcore import (
    MultiSetSample,
    ShotLedger,
    StateVector,
    apply_qeb_evolution,
    cnot_count,
    expectation,
    prepare_reference,
    sample_determinants,
    sampled_expectation,
)
from .solver import (
    IterationRecord,
    RunAborted,
    RunConfig,
    fci_ground_energy,
    fci_ground_state,
    run_adaptive,
    vqe_minimize,
)

__version__ = "0.1.0"

__all__ = [
    "Determinant",
    "ExcitationOperator",
    "OperatorPool",
    "build_pool",
    "hf_determinant",
    "FcidumpConsistencyError",
    "FcidumpFormatError",
    "MolecularIntegrals",
    "SpinOrbitalHamiltonian",
    "load_fcidump",
    "parse_fcidump",
    "resolve_system",
    "synth_integrals",
    "to_spin_orbitals",
    "write_fcidump",
    "gradient_exact",
    "gradient_sampled",
    "hg_alpha",
    "hsci_beta",
    "rank_and_select",
    "PauliWord",
    "QubitOperator",
    "jordan_wigner",
    "qeb_generator",
    "MultiSetSample",
    "ShotLedger",
    "StateVector",
    "apply_qeb_evolution",
    "cnot_count",
    "expectation",
    "prepare_reference",
    "sample_determinants",
    "sampled_expectation",
    "IterationRecord",
    "RunAborted",
    "RunConfig",
    "fci_ground_energy",
    "fci_ground_state",
    "run_adaptive",
    "vqe_minimize",
    "__version__",
]
