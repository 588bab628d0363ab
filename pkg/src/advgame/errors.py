"""Exception hierarchy for the advgame package."""


class AdvgameError(Exception):
    """Base class for all advgame errors."""


class GameValidationError(AdvgameError):
    """A game description violates a structural invariant."""


class EmptyVectorSet(GameValidationError):
    """The game has no attack vectors."""


class BadPrior(GameValidationError):
    """The attack probability is outside [0, 1]."""


class BadDistribution(GameValidationError):
    """A probability vector fails nonnegativity or normalization."""


class DegenerateDenominator(GameValidationError):
    """Some undetected + detected payoff sum falls below the safety floor.

    The optimal-detection formula divides by this sum, so it must stay
    bounded away from zero.
    """


class TypeOutOfRange(AdvgameError):
    """An attacker type index is outside [0, num_types)."""


class ProfileOutOfBox(AdvgameError):
    """A utility profile leaves its per-type gain box."""


class SolverFailure(AdvgameError):
    """The LP solver finished without a usable optimum.

    For validated games the equilibrium programs are always feasible and
    bounded, so this signals numerical trouble rather than bad input.
    """


class GridTooLarge(AdvgameError):
    """A grid-search oracle request exceeds the evaluation guard."""


class ZeroDenominator(AdvgameError):
    """The approximation-ratio metric is undefined (optimal loss is zero).

    Carries ``value_gap``, the raw difference between the optimal and
    trained objective values, as a fallback metric.
    """

    def __init__(self, message: str, value_gap: float = 0.0):
        super().__init__(message)
        self.value_gap = value_gap


class BadLabel(AdvgameError):
    """A dataset row carries an unusable class or type label."""


class MissingFeature(AdvgameError):
    """A dataset row lacks a feature required to evaluate payoffs."""


class MissingColumn(AdvgameError):
    """A CSV input lacks a required column."""


class FileError(AdvgameError):
    """A data file is missing or unreadable."""


class KTooLarge(AdvgameError):
    """A random-game feature count would exceed the memory guard."""


class VectorSetTooLarge(AdvgameError):
    """The vector set is too large for a full per-vector strategy."""
