"""Quasi-static nuclear field noise and seeded Monte Carlo averaging.

Every shot draws its own Gaussian frequency offsets for the two spins, frozen
for the whole measurement cycle.  Random streams are addressed by
``(seed, shot_index)`` rather than consumed sequentially, so a shot's sample
does not depend on which shots were evaluated before it or in what order.

The quoted nuclear "variance" of 0.275 MHz carries frequency units and is used
as the standard deviation of each offset.
"""

import dataclasses
import functools

import numpy as np

DEFAULT_SHOTS = 2000


@dataclasses.dataclass(frozen=True)
class NuclearBath:
    sigma_L: float = 0.0  # MHz
    sigma_R: float = 0.0  # MHz

    def __post_init__(self):
        if self.sigma_L < 0 or self.sigma_R < 0:
            raise ValueError("nuclear spreads must be >= 0")

    @classmethod
    def from_params(cls, params):
        return cls(params.sigma_L_MHz, params.sigma_R_MHz)

    @property
    def is_silent(self):
        return self.sigma_L == 0 and self.sigma_R == 0


@dataclasses.dataclass(frozen=True)
class NoiseSample:
    """One frozen realization: frequency shifts in MHz plus a spare phase."""

    df_L: float = 0.0
    df_R: float = 0.0
    phase: float = 0.0


NO_NOISE = NoiseSample()


@dataclasses.dataclass(frozen=True)
class RngStream:
    seed: int
    shot_index: int = 0

    def generator(self):
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.shot_index),))
        return np.random.Generator(np.random.PCG64(ss))


def _unit_draws(stream):
    rng = stream.generator()
    z = rng.standard_normal(2)
    phase = rng.uniform(0.0, 2 * np.pi)
    return z[0], z[1], phase


def sample(bath, stream):
    """Draw one :class:`NoiseSample` for the given stream."""
    zL, zR, phase = _unit_draws(stream)
    return NoiseSample(bath.sigma_L * zL, bath.sigma_R * zR, phase)


@functools.lru_cache(maxsize=32)
def _unit_batch(seed, shots):
    out = np.empty((shots, 3))
    for k in range(shots):
        out[k] = _unit_draws(RngStream(seed, k))
    out.setflags(write=False)
    return out


def sample_batch(bath, shots, seed):
    """Arrays ``(df_L, df_R, phase)`` for shots ``0 .. shots-1``.

    Row ``k`` equals ``sample(bath, RngStream(seed, k))`` exactly.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    u = _unit_batch(int(seed), int(shots))
    return bath.sigma_L * u[:, 0], bath.sigma_R * u[:, 1], u[:, 2].copy()


def ensemble_average(observable_fn, bath, shots=DEFAULT_SHOTS, seed=0):
    """Monte Carlo mean and standard error of ``observable_fn(NoiseSample)``.

    The reduction runs over shot indices in ascending order.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    dfL, dfR, phase = sample_batch(bath, shots, seed)
    values = np.array(
        [observable_fn(NoiseSample(dfL[k], dfR[k], phase[k])) for k in range(shots)],
        dtype=float,
    )
    return mean_and_stderr(values)


def mean_and_stderr(values, axis=0):
    values = np.asarray(values, dtype=float)
    n = values.shape[axis]
    mean = values.mean(axis=axis)
    if n < 2:
        return mean, np.zeros_like(mean)
    err = values.std(axis=axis, ddof=1) / np.sqrt(n)
    return mean, err
