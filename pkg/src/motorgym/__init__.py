"""Episode-based reinforcement-learning environments for converter-fed
electric drives: four DC motor variants and a synchronous machine behind
averaged converter models, with configurable rewards, references, limits and
noise, plus classical baseline controllers and benchmarking tools.
"""

from .benchmark import (BenchmarkReport, TrajectoryRecord, benchmark,
                        export_csv, import_csv, plot_record, run_episode)
from .controllers import HysteresisController, PiCascade, PiGains, tune_pi
from .converters import ActionBuffer, ActionSpaceDescriptor, ConverterSpec
from .envs import (EnvConfig, MotorEnv, StepResult, add_noise, limit_check,
                   normalize, reward, violation_penalty)
from .errors import (ConfigError, EpisodeError, InputError, MotorGymError,
                     NumericsError)
from .integrators import IntegratorChoice, step_ode
from .motors import (DcMotorParams, LoadParams, PmsmParams, build_motor,
                     load_torque)
from .references import (ReferenceConfig, ReferenceTrajectory,
                         generate_standard, reference_slice, sample_shape)
from .registry import default_config_dict, env_ids, make
from .transforms import (clarke_forward, clarke_inverse, park_forward,
                         park_inverse)

__version__ = "0.1.0"

__all__ = [
    "ActionBuffer", "ActionSpaceDescriptor", "BenchmarkReport",
    "ConfigError", "ConverterSpec", "DcMotorParams", "EnvConfig",
    "EpisodeError", "HysteresisController", "InputError", "IntegratorChoice",
    "LoadParams", "MotorEnv", "MotorGymError", "NumericsError", "PiCascade",
    "PiGains", "PmsmParams", "ReferenceConfig", "ReferenceTrajectory",
    "StepResult", "TrajectoryRecord", "add_noise", "benchmark",
    "build_motor", "clarke_forward", "clarke_inverse", "default_config_dict",
    "env_ids", "export_csv", "generate_standard", "import_csv",
    "limit_check", "load_torque", "make", "normalize", "park_forward",
    "park_inverse", "plot_record", "reference_slice", "reward",
    "run_episode", "sample_shape", "step_ode", "tune_pi",
    "violation_penalty",
]
