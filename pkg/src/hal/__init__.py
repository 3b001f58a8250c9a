"""hal: simulation and second-order averaging analysis for oscillatory
hybrid dynamical systems.

Core pieces: hybrid arcs and a fixed-step hybrid integrator, the
Lie-bracket averaging engine, a dwell-time switching automaton with schedule
checks, (T, rho)-closeness metrics, and four ready-to-run model-free
control scenarios.
"""

from .arcs import ArcSegment, HybridArc, HybridTimePoint, hybrid_time_slice
from .automaton import (AutomatonConfig, AutomatonState, ScheduleVerdict,
                        SwitchSchedule, automaton_embed, check_schedule,
                        schedule_from_arc, timer_rates)
from .averaging import (AveragedSystemSpec, QuadratureConfig,
                        build_average_system, control_affine_bracket_average,
                        f_bar_eval, field_bracket, first_order_average,
                        h_bar_eval, jacobian_x, lie_bracket_x, psi_eval,
                        u1_eval)
from .closeness import (ClosenessReport, IndicatorSpec, StabilityVerdict,
                        is_T_rho_close, min_rho, practical_stability_check)
from .errors import *  # noqa: F401,F403
from .identities import IdentityResult, run_identity_suite
from .oscillatory import (AssembledFlow, OscillatoryFlowSpec,
                          RegularityReport, TimerState, assemble_f_eps,
                          common_period, verify_regularity)
from .simulate import ValidationReport, simulate, validate_arc
from .systems import (HybridSystemSpec, OscillatoryBinding, ScheduledJump,
                      SolverConfig, oscillatory_step)

__version__ = "0.1.0"
