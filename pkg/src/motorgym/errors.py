"""Exception hierarchy for the drive environments."""


class MotorGymError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(MotorGymError):
    """Invalid configuration: bad parameter values, incompatible motor/converter
    combinations, or unknown configuration keys."""


class InputError(MotorGymError):
    """Invalid runtime input, e.g. an action outside the action space."""


class NumericsError(MotorGymError):
    """Numerical failure: non-finite state, or the adaptive integrator hit its
    minimum step size."""


class EpisodeError(MotorGymError):
    """Environment used outside its episode contract, e.g. ``step()`` after the
    episode finished or before ``reset()``."""
