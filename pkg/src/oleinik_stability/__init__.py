"""Numerical laboratory for degenerate shock plus rarefaction stability.

The viscous conservation law u_t + (u^3)_x = mu u_xx with Riemann data
u_minus < 0 < -u_minus/2 <= u_plus generates a degenerate (sonic) shock attached
to a rarefaction.  The package builds both waves, the weight function of the
weighted relative-entropy estimate, the shifted composite ansatz, a shock-frame
PDE solver with the shift ODE, and the energy diagnostics.
"""

from .ansatz import (AnsatzFields, CompositeAnsatz, ShiftState, SourceTerm, advance_shift,
                     ansatz_eval, build_composite_ansatz, shift_rhs, source_eval)
from .diagnostics import (BasinRow, ContractionVerdict, EnergyBreakdown, InteractionReport,
                          amplitude_sweep, contraction_monitor, convergence_metrics, energy_breakdown,
                          energy_identity_residual, interaction_integrals, weighted_energy)
from .errors import (BlowUpError, ConfigurationError, CoverageError, DomainError,
                     FitQualityError, NumericalError, OleinikError)
from .solver import (Grid, PerturbationSpec, SchemeConfig, SimulationState, Trajectory,
                     initial_data, run, step)
from .waves import (ApproxRarefaction, ShockProfile, WaveParameters, WavePattern,
                    build_approx_rarefaction, build_shock_profile, classify_riemann,
                    exact_rarefaction_eval, rarefaction_decay_report, shock_tail_bounds)
from .weight import WeightFunction, poincare_check, weight_algebra, weight_eval

__all__ = [
    "AnsatzFields", "ApproxRarefaction", "BasinRow", "BlowUpError", "CompositeAnsatz", "ConfigurationError",
    "ContractionVerdict", "CoverageError", "DomainError", "EnergyBreakdown", "FitQualityError",
    "Grid", "InteractionReport", "NumericalError", "OleinikError", "PerturbationSpec",
    "SchemeConfig", "ShiftState", "ShockProfile", "SimulationState", "SourceTerm", "Trajectory",
    "WaveParameters", "WavePattern", "WeightFunction", "advance_shift", "amplitude_sweep", "ansatz_eval",
    "build_approx_rarefaction", "build_composite_ansatz", "build_shock_profile",
    "classify_riemann", "contraction_monitor", "convergence_metrics", "energy_breakdown",
    "energy_identity_residual", "exact_rarefaction_eval", "initial_data", "interaction_integrals",
    "poincare_check", "rarefaction_decay_report", "run", "shift_rhs", "shock_tail_bounds",
    "source_eval", "step", "weight_algebra", "weight_eval", "weighted_energy",
]

__version__ = "0.1.0"
