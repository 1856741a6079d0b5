"""Command line front end: simulate data, estimate one observation, or run
a full sweep. One binary, flat config files, flags win over file values.

Exit codes: 0 success, 1 runtime or I/O failure, 2 usage error.
"""

import argparse
import os
import sys

import numpy as np

from . import config as cfg
from . import io as pio
from .config import ConfigError
from .estimators import EstimatorConfig, extract_support, run_estimator
from .harness import SweepConfig, run_sweep, trial_rng
from .model import (BernoulliGaussianPrior, PhaseMarkovModel,
                    build_dictionary, default_angle_grid,
                    sample_ground_truth, sample_phase_trajectory,
                    synthesize_observation)


def _build_parser():
    epilog = "config keys (file or --set KEY=VALUE):\n" + "\n".join(
        cfg.help_lines())
    parser = argparse.ArgumentParser(
        prog="phasedoa",
        description="Sparse DOA estimation under Markov phase noise",
        epilog=epilog,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--set", dest="assignments", action="append",
                       default=[], metavar="KEY=VALUE",
                       help="override any config key (repeatable)")
        p.add_argument("--seed", type=int, help="base seed")
        p.add_argument("--output-dir", help="directory for output files")

    sim = sub.add_parser("simulate", help="synthesize one observation")
    common(sim)
    sim.add_argument("--k", type=int, help="number of planted sources")
    sim.add_argument("--noise-var", type=float, help="additive noise variance")

    est = sub.add_parser("estimate", help="run one estimator on a file")
    common(est)
    est.add_argument("observation", help="columnar observation file")
    est.add_argument("--variant", help="pavbem, pavbem_relaxed, prvbem "
                                       "or beamforming")
    est.add_argument("--k", type=int, help="support size to report")
    est.add_argument("--noise-var", type=float, help="initial sigma^2")
    est.add_argument("--order", choices=("energy", "index"),
                     help="atom sweep order")
    est.add_argument("--diagnostics", metavar="PATH",
                     help="append per-iteration diagnostics to PATH")

    swp = sub.add_parser("sweep", help="Monte Carlo noise sweep")
    common(swp)
    swp.add_argument("--trials", type=int, help="trials per cell")
    swp.add_argument("--workers", type=int, help="parallel trial workers")
    swp.add_argument("--k", type=int, help="sweep a single source count")
    swp.add_argument("--noise-var", type=float, help="sweep a single sigma^2")
    swp.add_argument("--variant", help="run a single algorithm")
    swp.add_argument("--order", choices=("energy", "index"))
    return parser


def _load_values(args):
    values = cfg.parse_config(args.config) if args.config else cfg.defaults()
    for assignment in args.assignments:
        if "=" not in assignment:
            raise ConfigError("--set expects KEY=VALUE, got %r" % assignment)
        key, text = assignment.split("=", 1)
        values[key.strip()] = cfg.coerce(key.strip(), text.strip())
    overrides = {
        "seed": args.seed,
        "output_dir": args.output_dir,
        "k": getattr(args, "k", None),
        "noise_var": getattr(args, "noise_var", None),
        "variant": getattr(args, "variant", None),
        "n_trials": getattr(args, "trials", None),
        "workers": getattr(args, "workers", None),
        "order": getattr(args, "order", None),
    }
    return cfg.merge_overrides(values, overrides)


_VARIANT_NAMES = ("pavbem", "pavbem_relaxed", "prvbem", "beamforming")


def _model_pieces(values):
    if values["k"] > values["grid_size"]:
        raise ConfigError("k exceeds grid_size")
    if values["variant"] not in _VARIANT_NAMES:
        raise ConfigError("unknown variant: %s" % values["variant"])
    for alg in values["algorithms"]:
        if alg not in _VARIANT_NAMES:
            raise ConfigError("unknown algorithm: %s" % alg)
    dictionary = build_dictionary(values["n_sensors"],
                                  values["spacing_ratio"],
                                  default_angle_grid(values["grid_size"]))
    model = PhaseMarkovModel(a=values["a"],
                             sigma_theta_sq=values["sigma_theta_sq"],
                             sigma_1_sq=values["sigma_1_sq"])
    occupancy = np.full(values["grid_size"],
                        values["k"] / values["grid_size"])
    prior = BernoulliGaussianPrior(sigma_x_sq=values["sigma_x_sq"],
                                   occupancy=occupancy)
    return dictionary, model, prior


def _cmd_simulate(args):
    values = _load_values(args)
    dictionary, model, prior = _model_pieces(values)
    # same derivation as harness cell (0, 0, 0) so a sweep can be replayed
    rng = trial_rng(values["seed"], 0, 0, 0)
    truth = sample_ground_truth(prior, values["k"], rng)
    if values["phase_noise"]:
        truth.theta = sample_phase_trajectory(model, values["n_sensors"], rng)
    else:
        truth.theta = np.zeros(values["n_sensors"])
    obs = synthesize_observation(dictionary, truth, values["noise_var"], rng)

    out = values["output_dir"]
    os.makedirs(out, exist_ok=True)
    obs_path = os.path.join(out, "observation.txt")
    truth_path = os.path.join(out, "ground_truth.txt")
    pio.save_observation(obs_path, obs.y, truth.theta)
    pio.save_ground_truth(truth_path, truth.z)
    print("child seed: SeedSequence(%d, spawn_key=(0, 0, 0))" % values["seed"])
    print("wrote %s (%d sensors)" % (obs_path, values["n_sensors"]))
    print("wrote %s (%d atoms, %d active)"
          % (truth_path, values["grid_size"], len(truth.support)))
    return 0


def _diagnostics_writer(path):
    fh = open(path, "a")

    def trace(iteration, info):
        fh.write("iter %d sigma_sq %.17g spike_sum %.17g delta %.17g\n"
                 % (iteration, info["noise_var"], info["spike_sum"],
                    info["delta"]))
        fh.write("# m_theta Sigma_theta\n")
        for m, v in zip(info["phase_means"], info["phase_variances"]):
            fh.write("%.17g %.17g\n" % (m, v))
    return fh, trace


def _cmd_estimate(args):
    values = _load_values(args)
    try:
        y, _ = pio.load_observation(args.observation)
    except OSError as exc:
        print("cannot read %s: %s" % (args.observation, exc), file=sys.stderr)
        return 1
    dictionary, model, prior = _model_pieces(values)
    if y.shape[0] != values["n_sensors"]:
        print("dimension mismatch: file has %d sensors, config says %d"
              % (y.shape[0], values["n_sensors"]), file=sys.stderr)
        return 1

    est_config = EstimatorConfig(
        variant=values["variant"],
        max_iterations=values["max_iterations"],
        convergence_tol=values["convergence_tol"],
        estimate_noise=values["estimate_noise"],
        initial_noise_var=values["noise_var"] if args.noise_var is not None
        else values["initial_noise_var"],
        relax_iterations=values["relax_iterations"],
        order=values["order"])

    fh = None
    if args.diagnostics:
        fh, trace = _diagnostics_writer(args.diagnostics)
        from .estimators import _vbem  # diagnostics hook lives on the core
        if values["variant"] == "beamforming":
            est = run_estimator("beamforming", y, dictionary, model, prior,
                                est_config)
        else:
            phase_model = None if values["variant"] == "prvbem" else model
            eff_prior = prior if values["variant"] == "pavbem" else \
                BernoulliGaussianPrior(prior.sigma_x_sq,
                                       np.ones(values["grid_size"]))
            est = _vbem(y, dictionary, phase_model, eff_prior, est_config,
                        trace=trace)
        fh.close()
    else:
        est = run_estimator(values["variant"], y, dictionary, model, prior,
                            est_config)

    idx, angles = extract_support(est, values["k"], dictionary.angles)
    print("variant: %s" % values["variant"])
    print("iterations: %d (converged: %s)"
          % (est.iterations_used, est.converged))
    if np.isfinite(est.final_noise_var):
        print("final sigma^2: %.6g" % est.final_noise_var)
    print("top-%d atoms (index, angle deg, |z_hat|):" % values["k"])
    for i, ang in zip(idx, angles):
        print("  %3d  %+8.3f  %.5f"
              % (i, np.degrees(ang), np.abs(est.z_hat[i])))
    print("|z_hat|: " + " ".join("%.4f" % v for v in np.abs(est.z_hat)))
    return 0


def _cmd_sweep(args):
    values = _load_values(args)
    noise_grid = cfg.resolve_noise_grid(values)
    if args.noise_var is not None:
        noise_grid = (args.noise_var,)
    k_values = values["k_values"]
    if args.k is not None:
        k_values = (args.k,)
    algorithms = values["algorithms"]
    if args.variant is not None:
        algorithms = (args.variant,)
    for alg in algorithms:
        if alg not in _VARIANT_NAMES:
            raise ConfigError("unknown algorithm: %s" % alg)
    if values["k"] > values["grid_size"] or any(
            k > values["grid_size"] for k in k_values):
        raise ConfigError("k exceeds grid_size")

    os.makedirs(values["output_dir"], exist_ok=True)
    sweep = SweepConfig(
        n_sensors=values["n_sensors"], grid_size=values["grid_size"],
        spacing_ratio=values["spacing_ratio"], a=values["a"],
        sigma_theta_sq=values["sigma_theta_sq"],
        sigma_1_sq=values["sigma_1_sq"], sigma_x_sq=values["sigma_x_sq"],
        phase_noise=values["phase_noise"], k_values=tuple(k_values),
        noise_grid=tuple(noise_grid), n_trials=values["n_trials"],
        algorithms=tuple(algorithms), base_seed=values["seed"],
        workers=cfg.resolve_workers(values), output_dir=values["output_dir"],
        max_iterations=values["max_iterations"],
        convergence_tol=values["convergence_tol"],
        estimate_noise=values["estimate_noise"],
        relax_iterations=values["relax_iterations"], order=values["order"])

    def progress(k, noise_var, means, fails):
        cells = " ".join("%s=%.4f" % (a, v)
                         for a, v in zip(sweep.algorithms, means))
        line = "k=%d sigma2=%.3g %s" % (k, noise_var, cells)
        if fails.any():
            line += "  failed: " + "/".join(str(f) for f in fails)
        print(line)

    result = run_sweep(sweep, progress=progress)
    for k, path in result.paths.items():
        print("wrote %s" % path)
    for k, fails in result.failed_counts.items():
        total = int(fails.sum())
        if total:
            print("k=%d: %d failed trials excluded from means" % (k, total))
    return 0


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "estimate":
            return _cmd_estimate(args)
        return _cmd_sweep(args)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except OSError as exc:
        print("I/O error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
