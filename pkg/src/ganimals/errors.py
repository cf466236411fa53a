"""Exception types shared across the engine."""


class GanimalsError(Exception):
    """Base class for all engine errors."""


class ParseError(GanimalsError):
    """A data file row could not be parsed."""


class ValidationError(GanimalsError):
    """Loaded or supplied data violates an invariant."""


class UnknownCore(GanimalsError):
    pass


class UnknownCategory(GanimalsError):
    pass


class TruncationOutOfRange(GanimalsError):
    pass


class SameCategory(GanimalsError):
    pass


class WrongGeneration(GanimalsError):
    pass


class IdenticalParents(GanimalsError):
    pass


class InvalidMix(GanimalsError):
    pass


class EmptyLeaderboard(GanimalsError):
    pass


class PreconditionViolation(GanimalsError):
    pass


class NotInWorld(GanimalsError):
    pass


class UnknownGanimal(GanimalsError):
    pass


class EmptyRecord(GanimalsError):
    pass


class RatingOutOfRange(GanimalsError):
    pass


class UnknownMetric(GanimalsError):
    pass


class UnknownFeature(GanimalsError):
    pass


class InsufficientData(GanimalsError):
    pass


class BackendUnavailable(GanimalsError):
    """The render backend could not be reached after the configured retries."""


class RenderRejected(GanimalsError):
    """The render backend refused the request."""


class ConfigError(GanimalsError):
    pass
