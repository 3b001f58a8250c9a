"""Exception types raised across the toolkit."""

__all__ = [
    "HalError", "DimensionMismatch", "EscapeDetected", "StuckState",
    "ScheduleInfeasible", "ScheduleRejected", "InfeasibleSchedule",
    "NonpositiveEpsilon", "LengthMismatch", "BudgetExhausted",
    "DisconnectedGraph", "FrequencyCollision", "DeltaOutOfRange",
    "OffManifold", "ExcitationDeficient", "ConfigError",
]


class HalError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(HalError):
    """Arc and system state dimensions disagree."""


class EscapeDetected(HalError):
    """Simulated state left the configured escape radius."""

    def __init__(self, t, j, norm):
        super().__init__(f"state norm {norm:.3e} exceeded bound at (t={t:.6g}, j={j})")
        self.t = t
        self.j = j
        self.norm = norm


class StuckState(HalError):
    """State is in neither the flow set nor the jump set."""


class ScheduleInfeasible(HalError):
    """A scheduled jump fired while the state was outside the jump set."""


class ScheduleRejected(HalError):
    """Switch schedule violates the dwell-time / activation-time budgets."""


class InfeasibleSchedule(ScheduleRejected):
    """Scenario-level alias raised by builders for rejected schedules."""


class NonpositiveEpsilon(HalError):
    """Timescale parameter must be strictly positive."""


class LengthMismatch(HalError):
    """Paired callable lists have different lengths."""


class BudgetExhausted(HalError):
    """Automaton activation budget hit zero while an unstable mode is active."""


class DisconnectedGraph(HalError):
    """A network topology graph is not connected."""


class FrequencyCollision(HalError):
    """Probing frequencies must be pairwise distinct."""


class DeltaOutOfRange(HalError):
    """Hysteresis gap outside the admissible interval."""


class OffManifold(HalError):
    """Point is too far from the manifold for the requested operation."""


class ExcitationDeficient(HalError):
    """Probed excitation matrix P(x) is not uniformly positive definite."""


class ConfigError(HalError):
    """Scenario configuration file is missing, malformed, or inconsistent."""
