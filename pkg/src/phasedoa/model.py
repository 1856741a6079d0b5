"""Generative model: steering dictionary, sparse sources, Markov phase noise.

The observation is y = P D z + w where P = diag(exp(j*theta)) carries the
phase noise, D is the steering dictionary of a uniform linear array and z is
a sparse complex amplitude vector over the candidate-angle grid.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class SteeringDictionary:
    """Complex steering matrix over a candidate-angle grid.

    columns[n, i] = exp(j * 2pi * (delta/lambda) * (n+1) * sin(angles[i])),
    sensor index running 1..N as in the array convention d_i ending at
    exp(j * 2pi * (delta/lambda) * N * sin(phi)).
    """

    n_sensors: int
    spacing_ratio: float
    angles: np.ndarray
    columns: np.ndarray

    @property
    def n_atoms(self):
        return self.columns.shape[1]


@dataclass
class PhaseMarkovModel:
    """AR(1) phase chain: theta_1 ~ N(0, sigma_1_sq),
    theta_n = a * theta_{n-1} + N(0, sigma_theta_sq)."""

    a: float
    sigma_theta_sq: float
    sigma_1_sq: float

    def __post_init__(self):
        if not (self.sigma_theta_sq > 0 and self.sigma_1_sq > 0):
            raise ValueError("phase model variances must be positive")
        if self.a < 0:
            raise ValueError("AR coefficient a must be nonnegative")


@dataclass
class BernoulliGaussianPrior:
    """Spike-and-slab prior on the source amplitudes."""

    sigma_x_sq: float
    occupancy: np.ndarray  # p_i in [0, 1], one per atom

    def __post_init__(self):
        self.occupancy = np.asarray(self.occupancy, dtype=float)
        if self.sigma_x_sq <= 0:
            raise ValueError("sigma_x_sq must be positive")
        if np.any(self.occupancy < 0) or np.any(self.occupancy > 1):
            raise ValueError("occupancy probabilities must lie in [0, 1]")


@dataclass
class GroundTruth:
    z: np.ndarray
    support: np.ndarray
    theta: np.ndarray | None = None


@dataclass
class Observation:
    y: np.ndarray


def build_dictionary(n_sensors, spacing_ratio, angles):
    """Steering dictionary for a uniform linear array.

    Every column has unit-modulus entries and squared norm d^H d = N.
    """
    if n_sensors < 1:
        raise ValueError("n_sensors must be >= 1")
    if not np.isfinite(spacing_ratio):
        raise ValueError("spacing_ratio must be finite")
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    if angles.size == 0:
        raise ValueError("angle grid must be nonempty")
    if np.any(np.abs(angles) > np.pi / 2 + 1e-12):
        raise ValueError("angles must lie in [-pi/2, pi/2]")
    sensors = np.arange(1, n_sensors + 1)
    columns = np.exp(2j * np.pi * spacing_ratio * np.outer(sensors, np.sin(angles)))
    return SteeringDictionary(int(n_sensors), float(spacing_ratio), angles, columns)


def default_angle_grid(m):
    """Grid phi_i = -pi/2 + i*pi/m for i = 1..m, covering (-pi/2, pi/2]."""
    if m < 1:
        raise ValueError("grid size must be >= 1")
    return -np.pi / 2 + np.arange(1, m + 1) * (np.pi / m)


def sample_phase_trajectory(model, n, rng):
    """Draw theta_1..theta_n from the AR(1) chain. Phases are not wrapped;
    they only ever enter the model through exp(j*theta)."""
    if n < 1:
        raise ValueError("trajectory length must be >= 1")
    theta = np.empty(n)
    theta[0] = np.sqrt(model.sigma_1_sq) * rng.standard_normal()
    step = np.sqrt(model.sigma_theta_sq)
    for i in range(1, n):
        theta[i] = model.a * theta[i - 1] + step * rng.standard_normal()
    return theta


def sample_ground_truth(prior, k, rng):
    """Draw a k-sparse amplitude vector: support uniform without replacement,
    amplitudes circular complex Gaussian with variance sigma_x_sq."""
    m = prior.occupancy.shape[0]
    if not 0 <= k <= m:
        raise ValueError("k must satisfy 0 <= k <= number of atoms")
    support = np.sort(rng.choice(m, size=k, replace=False))
    z = np.zeros(m, dtype=complex)
    scale = np.sqrt(prior.sigma_x_sq / 2)
    z[support] = scale * (rng.standard_normal(k) + 1j * rng.standard_normal(k))
    return GroundTruth(z=z, support=support)


def synthesize_observation(dictionary, truth, noise_var, rng):
    """y_n = exp(j*theta_n) * (D z)_n + w_n, w_n circular complex Gaussian
    with total variance noise_var (variance noise_var/2 per component)."""
    if noise_var < 0:
        raise ValueError("noise variance must be nonnegative")
    if truth.z.shape[0] != dictionary.columns.shape[1]:
        raise ValueError("z length does not match dictionary atom count")
    if truth.theta is None or truth.theta.shape[0] != dictionary.n_sensors:
        raise ValueError("theta length does not match sensor count")
    clean = np.exp(1j * truth.theta) * (dictionary.columns @ truth.z)
    n = dictionary.n_sensors
    scale = np.sqrt(noise_var / 2)
    noise = scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return Observation(y=clean + noise)
