"""Variational Bayes DOA estimation of sparse plane waves under
multiplicative Markov phase noise, with baselines and a seeded Monte Carlo
sweep harness."""

from .coefficients import (CoefficientPosterior, estimate_noise_variance,
                           phase_corrected_observation, sweep_atoms,
                           sweep_order, update_atom)
from .estimators import (DoaEstimate, EstimatorConfig, beamforming,
                         extract_support, pavbem, pavbem_relaxed,
                         prvbem_baseline, run_estimator)
from .harness import (SweepConfig, SweepResult, TrialRecord,
                      normalized_correlation, read_dat, run_sweep, run_trial,
                      trial_rng,
                      write_dat)
from .model import (BernoulliGaussianPrior, GroundTruth, Observation,
                    PhaseMarkovModel, SteeringDictionary, build_dictionary,
                    default_angle_grid, sample_ground_truth,
                    sample_phase_trajectory, synthesize_observation)
from .phase import (PhasePosterior, PhasePrecision, PseudoObservations,
                    bessel_ratio, circular_moment, compute_eta,
                    noninformative_posterior, prior_marginals,
                    prior_precision, pseudo_observations, smooth)

__version__ = "0.1.0"

__all__ = [
    "BernoulliGaussianPrior", "CoefficientPosterior", "DoaEstimate",
    "EstimatorConfig", "GroundTruth", "Observation", "PhaseMarkovModel",
    "PhasePosterior", "PhasePrecision", "PseudoObservations",
    "SteeringDictionary", "SweepConfig", "SweepResult", "TrialRecord",
    "beamforming", "bessel_ratio", "build_dictionary", "circular_moment",
    "compute_eta", "default_angle_grid", "estimate_noise_variance",
    "extract_support", "noninformative_posterior", "normalized_correlation",
    "pavbem", "pavbem_relaxed", "phase_corrected_observation",
    "prior_marginals", "prior_precision", "prvbem_baseline",
    "pseudo_observations", "read_dat", "run_estimator", "run_sweep",
    "run_trial", "sample_ground_truth", "sample_phase_trajectory", "trial_rng",
    "smooth", "sweep_atoms", "sweep_order", "synthesize_observation",
    "update_atom", "write_dat",
]
