"""Per-episode reference trajectories.

Four standard waveforms (sinusoid, asymmetric triangle, rectangle, sawtooth)
with random period, amplitude, offset and phase, plus band-limited random
references obtained by driving the motor itself: a random discrete Fourier
spectrum with limited bandwidth is drawn for the input voltage, transformed
to the time domain, applied to the motor open loop, and the resulting state
trajectories are recorded as references.  Random references therefore are
dynamically feasible by construction.

All trajectories are produced in normalized units and clipped to the nominal
band ``[-1/xi, 1/xi]`` (``[0, 1/xi]`` for nonnegative quantities), keeping
the safety margin between reference and hard limit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .converters import DUTY_RANGE, ConverterSpec
from .errors import ConfigError, EpisodeError, NumericsError
from .integrators import IntegratorChoice, step_ode
from .motors import LoadParams, MotorModel, PmsmMotor

SHAPES = ("sinusoid", "triangle", "rectangle", "sawtooth", "fourier")


@dataclass(frozen=True)
class ReferenceConfig:
    """Tunable knobs of the generator.

    ``probabilities`` are the episode-level draw weights of
    (sinusoid, triangle, rectangle, sawtooth, fourier); ``period_fraction``
    bounds the waveform period as a fraction of the episode length;
    ``fourier_cutoff_divisor`` sets the voltage-spectrum bandwidth to
    ``1 / (divisor * tau)``.
    """

    probabilities: tuple = (0.125, 0.125, 0.125, 0.125, 0.5)
    period_fraction: tuple = (0.01, 1.0)
    fourier_cutoff_divisor: float = 20.0
    fourier_max_retries: int = 5

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probabilities)
        if len(probs) != len(SHAPES) or any(p < 0 for p in probs):
            raise ConfigError("reference probabilities must be 5 nonnegative values")
        if abs(sum(probs) - 1.0) > 1e-9:
            raise ConfigError("reference probabilities must sum to 1")
        object.__setattr__(self, "probabilities", probs)
        lo, hi = (float(v) for v in self.period_fraction)
        if not 0.0 < lo <= hi:
            raise ConfigError("period_fraction must satisfy 0 < lo <= hi")
        if not self.fourier_cutoff_divisor > 0:
            raise ConfigError("fourier_cutoff_divisor must be > 0")


@dataclass
class ReferenceTrajectory:
    """References for one episode: per-entry normalized sequences of length
    episode_length + prediction_horizon.  For random references the applied
    duty sequence and the initial state are kept so the trajectory can be
    re-simulated."""

    values: dict = field(default_factory=dict)
    shape: str = "fourier"
    length: int = 0
    duty: np.ndarray | None = None
    initial_state: np.ndarray | None = None


def sample_shape(rng: np.random.Generator,
                 probabilities=(0.125, 0.125, 0.125, 0.125, 0.5)) -> str:
    """Draw the episode's reference kind."""
    u = rng.uniform()
    acc = 0.0
    for name, p in zip(SHAPES, probabilities):
        acc += p
        if u < acc:
            return name
    return SHAPES[-1]


def _waveform(shape: str, frac: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Unit waveform in [-1, 1] over the phase fraction in [0, 1)."""
    if shape == "sinusoid":
        return np.sin(2.0 * np.pi * frac)
    if shape == "triangle":
        rise = rng.uniform(0.1, 0.9)
        up = -1.0 + 2.0 * frac / rise
        down = 1.0 - 2.0 * (frac - rise) / (1.0 - rise)
        return np.where(frac < rise, up, down)
    if shape == "rectangle":
        duty = rng.uniform(0.1, 0.9)
        return np.where(frac < duty, 1.0, -1.0)
    if shape == "sawtooth":
        return -1.0 + 2.0 * frac
    raise ConfigError(f"unknown standard shape {shape!r}")


def generate_standard(shape: str, length: int, rng: np.random.Generator,
                      low: float, high: float, period_steps: tuple,
                      amplitude: float | None = None,
                      offset: float | None = None,
                      phase: float | None = None) -> np.ndarray:
    """One standard-shape trajectory in normalized units, clipped to
    [low, high].

    Period (in steps), amplitude, offset and initial phase are drawn
    uniformly unless given explicitly; the triangle additionally draws its
    rise fraction and the rectangle its duty ratio.
    """
    if length < 1:
        raise ConfigError("trajectory length must be >= 1")
    period = rng.uniform(*period_steps)
    if amplitude is None:
        amplitude = rng.uniform(0.0, high)
    if offset is None:
        offset = rng.uniform(low, high)
    if phase is None:
        phase = rng.uniform(0.0, 1.0)
    frac = (np.arange(length) / period + phase) % 1.0
    return np.clip(offset + amplitude * _waveform(shape, frac, rng), low, high)


def draw_spectrum(rng: np.random.Generator, length: int, cutoff_bin: int) -> np.ndarray:
    """Random one-sided voltage spectrum: uniform phases, 1/f-decaying
    magnitudes up to the cutoff bin, zero above."""
    spectrum = np.zeros(length // 2 + 1, dtype=complex)
    spectrum[0] = rng.uniform(-1.0, 1.0)
    k_max = min(cutoff_bin, length // 2)
    if k_max >= 1:
        k = np.arange(1, k_max + 1)
        mags = rng.uniform(0.0, 1.0, k_max) / k
        phases = rng.uniform(0.0, 2.0 * np.pi, k_max)
        spectrum[1:k_max + 1] = mags * np.exp(1j * phases)
    return spectrum


def duty_from_spectrum(spectrum: np.ndarray, length: int,
                       lo: float, hi: float,
                       span_fraction: float, center: float) -> np.ndarray:
    """Inverse-transform a spectrum and scale it affinely into the duty
    range: peak-to-peak span = span_fraction * (hi - lo), centered at
    ``center``.  A flat signal collapses to the constant center."""
    x = np.fft.irfft(spectrum, length)
    ptp = float(x.max() - x.min())
    span = span_fraction * (hi - lo)
    if ptp < 1e-12 or span <= 0.0:
        return np.full(length, float(np.clip(center, lo, hi)))
    d = (x - x.min()) / ptp * span + (center - 0.5 * span)
    return np.clip(d, lo, hi)


def _ideal_voltage(spec: ConverterSpec, duty_row: np.ndarray) -> np.ndarray:
    """Duty -> averaged voltage without secondary effects; used only while
    generating references."""
    gain = 0.5 * spec.u_sup if spec.topology == "B6" else spec.u_sup
    return duty_row * gain


def simulate_open_loop(motor: MotorModel, converter: ConverterSpec,
                       load: LoadParams, integrator: IntegratorChoice,
                       duty: np.ndarray, initial_state: np.ndarray,
                       limits: np.ndarray) -> np.ndarray:
    """Apply a duty sequence open loop and record the normalized physical
    state vector at every step (before advancing)."""
    n = duty.shape[0]
    state = np.asarray(initial_state, dtype=float).copy()
    rows = np.empty((n, len(limits)))
    u_sup = converter.u_sup
    wrap = isinstance(motor, PmsmMotor)
    for t in range(n):
        u = _ideal_voltage(converter, duty[t])
        rows[t] = motor.env_state_vector(state, u, u_sup) / limits
        state = step_ode(integrator, lambda y: motor.derivative(y, u, load), state)
        if wrap:
            state = motor.wrap_angle(state)
    return rows


def generate_random_fourier(motor: MotorModel, converter: ConverterSpec,
                            load: LoadParams, integrator: IntegratorChoice,
                            length: int, rng: np.random.Generator,
                            entries: tuple, limits: np.ndarray,
                            ref_lows: np.ndarray, ref_high: float,
                            initial_state: np.ndarray, n_units: int,
                            cfg: ReferenceConfig) -> ReferenceTrajectory:
    """Band-limited random references: random voltage spectrum -> open-loop
    simulation -> all states recorded and clipped to the nominal band."""
    cutoff_bin = int(length // cfg.fourier_cutoff_divisor)
    channels = converter.channels * n_units
    lo, hi = DUTY_RANGE[converter.topology]
    for _ in range(cfg.fourier_max_retries):
        duty = np.empty((length, channels))
        for ch in range(channels):
            spectrum = draw_spectrum(rng, length, cutoff_bin)
            span_fraction = rng.uniform(0.0, 1.0)
            span = span_fraction * (hi - lo)
            center = rng.uniform(lo + 0.5 * span, hi - 0.5 * span)
            duty[:, ch] = duty_from_spectrum(spectrum, length, lo, hi,
                                             span_fraction, center)
        try:
            rows = simulate_open_loop(motor, converter, load, integrator,
                                      duty, initial_state, limits)
        except NumericsError:
            continue
        values = {
            name: np.clip(rows[:, k], ref_lows[k] * ref_high, ref_high)
            for k, name in enumerate(entries)
        }
        return ReferenceTrajectory(values=values, shape="fourier", length=length,
                                   duty=duty,
                                   initial_state=np.asarray(initial_state, float).copy())
    raise NumericsError(
        f"random reference generation diverged {cfg.fourier_max_retries} times")


def generate_episode(motor: MotorModel, converter: ConverterSpec,
                     load: LoadParams, integrator: IntegratorChoice,
                     length: int, episode_length: int,
                     rng: np.random.Generator,
                     entries: tuple, limits: np.ndarray,
                     ref_lows: np.ndarray, xi: float,
                     tracked: tuple, zero_refs: tuple,
                     initial_state: np.ndarray, n_units: int,
                     cfg: ReferenceConfig) -> ReferenceTrajectory:
    """Draw the episode's reference: one shape kind, then one trajectory per
    tracked entry (standard shapes are drawn independently per entry; random
    references come from one shared simulation).  Entries with a forced zero
    reference are identically zero."""
    ref_high = 1.0 / xi
    shape = sample_shape(rng, cfg.probabilities)
    if shape == "fourier":
        traj = generate_random_fourier(motor, converter, load, integrator,
                                       length, rng, entries, limits, ref_lows,
                                       ref_high, initial_state, n_units, cfg)
    else:
        p_lo = max(1.0, cfg.period_fraction[0] * episode_length)
        p_hi = max(p_lo, cfg.period_fraction[1] * episode_length)
        values = {}
        for k, name in enumerate(entries):
            if name not in tracked:
                continue
            values[name] = generate_standard(
                shape, length, rng, ref_lows[k] * ref_high, ref_high, (p_lo, p_hi))
        traj = ReferenceTrajectory(values=values, shape=shape, length=length)
    for name in zero_refs:
        traj.values[name] = np.zeros(length)
    return traj


def reference_slice(traj: ReferenceTrajectory, tracked: tuple,
                    t: int, horizon: int) -> np.ndarray:
    """Reference window presented to the agent: for each tracked entry the
    values at steps t .. t+horizon-1, concatenated entry-major."""
    if t < 0 or t + horizon > traj.length:
        raise EpisodeError(
            f"reference slice [{t}, {t + horizon}) outside trajectory of "
            f"length {traj.length}")
    return np.concatenate([traj.values[name][t:t + horizon] for name in tracked])
