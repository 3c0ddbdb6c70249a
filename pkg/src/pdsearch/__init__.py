"""Partial-diffusion quantum search: exact simulation and closed-form analysis."""

from .analytic import (
    AmplitudeTriple,
    RunReport,
    SearchParams,
    Source,
    amplitudes_by_recurrence,
    amplitudes_closed_form,
    average_success_classical,
    average_success_first_iteration,
    average_success_grover,
    certainty_iteration_exact,
    chebyshev_u,
    classical_success_probability,
    failure_probability,
    grover_iterations,
    grover_success_probability,
    recurrence_step,
    required_iterations,
    success_probability,
)
from .errors import DomainError, PDSearchError, ShapeError, SizeError
from .operators import (
    MarkedSet,
    apply_grover_diffusion,
    apply_oracle,
    apply_partial_diffusion,
    apply_phase_oracle,
    build_partial_diffusion_dense,
    run_grover,
    run_search,
)
from .statevector import (
    StateVector,
    apply_dense_unitary,
    new_prepared_register,
    probability_of_index_set,
    sample_measurement,
)

__version__ = "0.1.0"
