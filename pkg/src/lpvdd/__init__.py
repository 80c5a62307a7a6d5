"""Data-driven representation, simulation and control of shifted-affine LPV systems."""
from .control import ControlProblem, ControlResult, PSI_REGISTRY, iterate, qp_step
from .ddrep import (DataDictionary, DdRepresentation, RankReport, build, embedded_pe_check,
                    gpe_check, min_samples, naive_input_pe_check, restricted_image_rank,
                    restriction_kernel)
from .exceptions import (AlignmentError, DepthError, DimensionError, InconsistentWindowError,
                         InfeasibleError, InsufficientWindowError, LpvddError)
from .models import (Complexity, LpvIoModel, LpvSsModel, SchedulingMap, behavior_basis,
                     initial_state, kernel_residual, realize_ss, simulate_io, simulate_ss,
                     structured_split)
from .signals import HankelMatrix, SchedulingTrajectory, Trajectory, hankel, kron_lift
from .simulate import SimProblem, SimResult, dd_simulate, solution_samples

__version__ = "0.1.0"
