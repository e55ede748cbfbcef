"""Matrix (Dirac-form) electrodynamics: algebra, field bispinors, symbolic
expansion into component systems, bilinear identities, a 1D wave integrator
and the nonlinear self-action equation."""

__version__ = "0.1.0"

from .bilinears import InvariantReport, bilinear, invariant_report
from .errors import (CflViolation, DiracMaxwellError, EmptyRegion, InsufficientSamples,
                     InvalidSpec, NoConvergence, NoEigenvector, NotTransverse, NotUnitary,
                     NumericalBlowup)
from .expander import (EquationSpec, PdeSystem, PdeTerm, expand, factor_wave_equation,
                       reference_system, systems_match)
from .lagrangian import (LagrangianReport, SelfActionParams, currents, fierz_both_sides,
                         lagrangian_dirac, lagrangian_em, nonlinear_fixed_point,
                         nonlinear_lagrangian, nonlinear_residual, self_energy, self_momentum)
from .matrices import (Axis, Index, MatrixFamily, MatrixLabel, Orientation, Representation,
                       dirac_matrix, matrix_family, unitary_S)
from .spinors import FieldFrame, WaveKind, bispinor_to_field, charge_conjugate, field_to_bispinor
from .wave import (ConservationTrace, PlaneWave, SimConfig, SimState, analytic_plane_wave,
                   dispersion_omega, measure_dispersion, run, step)

__all__ = [name for name in dir() if not name.startswith("_")]
