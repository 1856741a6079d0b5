"""Seeded Monte Carlo sweeps over noise variance and source count.

Every trial derives its generator from SeedSequence(base_seed, spawn_key=
(k_index, noise_index, trial_index)), a pure function of the indices, so a
sweep gives byte-identical output no matter how many workers run it.
"""

import logging
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .estimators import EstimatorConfig, run_estimator
from .model import (BernoulliGaussianPrior, PhaseMarkovModel,
                    build_dictionary, default_angle_grid,
                    sample_ground_truth, sample_phase_trajectory,
                    synthesize_observation)

logger = logging.getLogger(__name__)

DEFAULT_ALGORITHMS = ("beamforming", "prvbem", "pavbem_relaxed", "pavbem")


def default_noise_grid():
    # 8 log-spaced points over [1e-3, 1]; the figure transition lives here
    return tuple(np.logspace(-3, 0, 8))


@dataclass
class SweepConfig:
    n_sensors: int = 256
    grid_size: int = 50
    spacing_ratio: float = 4.0
    a: float = 0.8
    sigma_theta_sq: float = 1.0
    sigma_1_sq: float = 1e6
    sigma_x_sq: float = 1.0
    phase_noise: bool = True
    k_values: tuple = (2, 5)
    noise_grid: tuple = field(default_factory=default_noise_grid)
    n_trials: int = 50
    algorithms: tuple = DEFAULT_ALGORITHMS
    base_seed: int = 1234
    workers: int = 1
    output_dir: str = "."
    max_iterations: int = 200
    convergence_tol: float = 1e-6
    estimate_noise: bool = True
    relax_iterations: int = 25
    order: str = "energy"

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")
        grid = np.asarray(self.noise_grid, dtype=float)
        if grid.size == 0 or np.any(grid <= 0):
            raise ValueError("noise_grid must be nonempty and positive")
        for alg in self.algorithms:
            if alg not in DEFAULT_ALGORITHMS:
                raise ValueError("unknown algorithm %r" % (alg,))


@dataclass
class TrialRecord:
    k: int
    noise_var: float
    trial_index: int
    seed_key: tuple
    correlations: dict
    iterations: dict
    runtimes: dict
    failed: dict


@dataclass
class SweepResult:
    tables: dict        # k -> ndarray, column 0 sigma^2, then one per algorithm
    failed_counts: dict  # k -> ndarray (n_noise, n_algorithms)
    paths: dict         # k -> written .dat path
    algorithms: tuple


def normalized_correlation(z, z_hat):
    """|z^H z_hat| / (||z|| ||z_hat||); 0 by convention if either is zero."""
    nz = np.linalg.norm(z)
    nh = np.linalg.norm(z_hat)
    if nz == 0 or nh == 0:
        logger.warning("normalized_correlation of a zero vector, returning 0")
        return 0.0
    # Cauchy-Schwarz bounds this by 1; rounding can overshoot by ~1e-16
    return min(np.abs(np.vdot(z, z_hat)) / (nz * nh), 1.0)


def trial_rng(base_seed, k_index, noise_index, trial_index):
    seq = np.random.SeedSequence(base_seed,
                                 spawn_key=(k_index, noise_index, trial_index))
    return np.random.default_rng(seq)


def run_trial(config, k_index, noise_index, trial_index):
    """Synthesize one draw and score every selected algorithm on it.

    Estimator exceptions and non-finite outputs mark the algorithm failed
    for this trial instead of aborting the sweep.
    """
    k = config.k_values[k_index]
    noise_var = float(np.asarray(config.noise_grid, dtype=float)[noise_index])
    rng = trial_rng(config.base_seed, k_index, noise_index, trial_index)

    dictionary = build_dictionary(config.n_sensors, config.spacing_ratio,
                                  default_angle_grid(config.grid_size))
    model = PhaseMarkovModel(a=config.a, sigma_theta_sq=config.sigma_theta_sq,
                             sigma_1_sq=config.sigma_1_sq)
    occupancy = np.full(config.grid_size, k / config.grid_size)
    prior = BernoulliGaussianPrior(sigma_x_sq=config.sigma_x_sq,
                                   occupancy=occupancy)

    truth = sample_ground_truth(prior, k, rng)
    if config.phase_noise:
        truth.theta = sample_phase_trajectory(model, config.n_sensors, rng)
    else:
        truth.theta = np.zeros(config.n_sensors)
    y = synthesize_observation(dictionary, truth, noise_var, rng).y

    correlations, iterations, runtimes, failed = {}, {}, {}, {}
    for alg in config.algorithms:
        est_config = EstimatorConfig(
            variant=alg, max_iterations=config.max_iterations,
            convergence_tol=config.convergence_tol,
            estimate_noise=config.estimate_noise,
            initial_noise_var=noise_var,
            relax_iterations=config.relax_iterations, order=config.order)
        start = time.perf_counter()
        try:
            est = run_estimator(alg, y, dictionary, model, prior, est_config)
            if not np.all(np.isfinite(est.z_hat)):
                raise FloatingPointError("non-finite estimate")
            correlations[alg] = normalized_correlation(truth.z, est.z_hat)
            iterations[alg] = est.iterations_used
            failed[alg] = False
        except Exception:
            logger.exception("trial (k=%d, sigma2=%g, t=%d) failed for %s",
                             k, noise_var, trial_index, alg)
            correlations[alg] = float("nan")
            iterations[alg] = 0
            failed[alg] = True
        runtimes[alg] = time.perf_counter() - start
    return TrialRecord(k=k, noise_var=noise_var, trial_index=trial_index,
                       seed_key=(config.base_seed, k_index, noise_index,
                                 trial_index),
                       correlations=correlations, iterations=iterations,
                       runtimes=runtimes, failed=failed)


def _trial_task(args):
    return run_trial(*args)


def run_sweep(config, progress=None, write=True):
    """Run every (k, sigma^2, trial) cell and write one table per k.

    Aggregation walks trials in index order whatever the execution order
    was, so the means (and the files) do not depend on the worker count.
    """
    tasks = [(config, ki, ni, t)
             for ki in range(len(config.k_values))
             for ni in range(len(config.noise_grid))
             for t in range(config.n_trials)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(_trial_task, tasks, chunksize=1))
    else:
        records = [run_trial(*args) for args in tasks]

    by_cell = {}
    for rec, args in zip(records, tasks):
        _, ki, ni, t = args
        by_cell[(ki, ni, t)] = rec

    grid = np.asarray(config.noise_grid, dtype=float)
    n_alg = len(config.algorithms)
    tables, failed_counts, paths = {}, {}, {}
    for ki, k in enumerate(config.k_values):
        table = np.empty((grid.size, 1 + n_alg))
        fails = np.zeros((grid.size, n_alg), dtype=int)
        for ni, noise_var in enumerate(grid):
            table[ni, 0] = noise_var
            for ai, alg in enumerate(config.algorithms):
                values = []
                for t in range(config.n_trials):
                    rec = by_cell[(ki, ni, t)]
                    if rec.failed[alg]:
                        fails[ni, ai] += 1
                    else:
                        values.append(rec.correlations[alg])
                table[ni, 1 + ai] = np.mean(values) if values else float("nan")
            if progress is not None:
                progress(k, noise_var, table[ni, 1:], fails[ni])
        tables[k] = table
        failed_counts[k] = fails
        if write:
            path = os.path.join(config.output_dir, "corr_vs_noise_k%d.dat" % k)
            write_dat(table, path, ("sigma_sq",) + tuple(config.algorithms))
            paths[k] = path
    return SweepResult(tables=tables, failed_counts=failed_counts,
                       paths=paths, algorithms=tuple(config.algorithms))


def write_dat(table, path, column_names):
    """Whitespace-delimited table, one header comment naming the columns,
    full float precision. Written to a temp file and renamed into place so
    an interrupted run leaves no partial file."""
    table = np.atleast_2d(np.asarray(table, dtype=float))
    if table.size == 0:
        raise ValueError("refusing to write an empty table")
    if len(column_names) != table.shape[1]:
        raise ValueError("column name count does not match table width")
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".dat-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write("# " + " ".join(column_names) + "\n")
            for row in table:
                fh.write(" ".join("%.17g" % v for v in row) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def read_dat(path):
    return np.loadtxt(path, comments="#", ndmin=2)
