"""Joint transmit-power and antenna-count allocation for massive-MIMO OFDM downlinks."""
from .channel import (ChannelRealization, SystemParams, asymptotic_capacity, dbm_to_watt,
                      exact_capacity, mrt_gain, sample_channel, watt_to_dbm)
from .errors import ConfigError, DomainError, InfeasibleError
from .kernels import BACKEND_NAME
from .powermodel import Allocation, FeasibilityReport, PowerBreakdown, check_feasibility, total_power
from .solver import (DualState, SolveReport, SolverConfig, capacity_of, integerize, solve,
                     solve_relaxed, subproblem_solution, update_multipliers)

__version__ = "0.1.0"
