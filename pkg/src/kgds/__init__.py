"""kgds: Klein-Gordon fields around a black hole with static Schwarzschild
radius in a de Sitter universe, via the integral-transform method.

The library builds solutions of the damped, mass-shifted wave equation in the
expanding universe out of finite-time solutions of the static exterior wave
equation, convolved with explicit Gauss-hypergeometric kernels, and certifies
the kernel identities, decay rates, and small-data fixed-point machinery at
desk scale.
"""

__version__ = "0.1.0"

from .geometry import (BracketFailure, PhysicalParams, aux_symbol,
                       char_speed_bound, conformal_time, damping_gradient,
                       geodesic_radius, geodesic_support_margin,
                       influence_radius, lapse_F, lower_symbol,
                       principal_symbol)
from .hyp2f1 import InvalidParams, NonConvergence, gauss_2f1, gauss_2f1_dd
from .kernels import (CRITICAL, INTERMEDIATE, LARGE_MASS, SMALL_LIGHT,
                      SUPERCRITICAL, CurvedMass, DenominatorSingular,
                      DomainViolation, KernelEval, curved_mass, eval_dtE,
                      eval_E, eval_K0_alt, eval_K0_direct, eval_K1, phi)
from .semilinear import (HorizonExceeded, NoContraction, Nonlinearity,
                         PicardDiagnostics, Potential, field_norm,
                         lifespan_probe, picard_iterate, potential_eps0,
                         psi_id, weighted_norm)
from .static_wave import (BoundaryContamination, CFLViolation, RadialField,
                          RadialGrid, SnapshotSeries, bump_profile, energy,
                          evolve, flat_wave_oracle, radial_operator_apply,
                          solve_static)
from .transform import (GOperator, QuadratureUnderResolved, SpaceTimeField,
                        TransformConfig, apply_G, config_for,
                        homogeneous_ode_solution, liouville, residual,
                        solve_linear_homogeneous, source_ode_solution)
from .verify import BoundReport, fit_exponent, run_all
