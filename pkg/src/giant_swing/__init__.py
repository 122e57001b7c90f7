"""Acrobot energy regulation via momentum-coupled virtual constraints."""

from .constraint import (ConstraintError, ConstraintSingular, VnhcSpec,
                         constraint_value, decoupling_scalar,
                         enforcement_torque, manifold_state,
                         momentum_completion, reduced_vector_field,
                         regularity_check)
from .integrator import (EventHit, EventSpec, IntegrationError,
                        IntegratorConfig, Trajectory, compiled_available,
                        integrate)
from .kernels import full_field, reduced_field
from .mechanics import (FullState, MechanicalSystem, full_vector_field,
                        normalize_input_matrix, poisson_bracket,
                        simply_actuated_transform, total_energy, wrap_angle)
from .models import (DistributedParams, ReducedState, SimplifiedParams,
                     TESTBED_PARAMS, boundary_momentum, critical_level,
                     distributed_system, energy_report, nominal_energy,
                     simplified_system)

__version__ = "0.1.0"
