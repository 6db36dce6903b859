"""Spontaneous emission and entanglement of two dipole-coupled two-level atoms."""
from ._backend import get_backend, set_backend
from .analytic import (
    DiagonalDecomposition,
    both_excited_populations,
    both_excited_populations_dicke,
    diagonal_decomposition,
    one_excited_solution,
)
from .couplings import (
    CAPTION_COUPLINGS,
    AtomPairConfig,
    CouplingParams,
    collective_damping,
    compute_couplings,
    dipole_dipole_shift,
)
from .dynamics import (
    NumericalInvariantError,
    SystemParams,
    Trajectory,
    collective_rhs,
    integrate,
    product_liouvillian_rhs,
)
from .entanglement import (
    MeasureResult,
    concurrence,
    diagonal_criterion,
    hermitian_eigenvalues,
    measures,
    negativity,
    partial_transpose,
    pt_spectrum_one_excited,
    x_state_concurrence,
)
from .hilbert import BasisTag, DensityMatrix, basis_change, nonidentical_mixing, pure_state_density
from .scenario import ScenarioSpec, figure_preset, run_scenario, write_csv

__version__ = "0.1.0"
