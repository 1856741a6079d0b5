"""Flat key=value configuration files plus override merging.

One registry drives parsing, defaults, type coercion and the CLI help
listing. Unknown keys are rejected by name.
"""

import os

import numpy as np


class ConfigError(Exception):
    """Bad configuration key or value; the CLI maps this to exit code 2."""


def _parse_bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError("not a boolean: %r" % (text,))


def _parse_optional_float(text):
    if text.strip().lower() in ("auto", "none"):
        return None
    return float(text)


def _parse_int_list(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _parse_float_list(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _parse_str_list(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


# key -> (default, parser, help)
SCHEMA = {
    "n_sensors": (256, int, "array size N"),
    "grid_size": (50, int, "number of candidate angles M"),
    "spacing_ratio": (4.0, float, "sensor spacing over wavelength"),
    "a": (0.8, float, "AR coefficient of the phase chain"),
    "sigma_theta_sq": (1.0, float, "phase innovation variance"),
    "sigma_1_sq": (1e6, float, "initial phase variance"),
    "sigma_x_sq": (1.0, float, "slab variance of source amplitudes"),
    "k": (5, int, "number of planted sources"),
    "noise_var": (0.01, float, "additive noise variance sigma^2"),
    "seed": (1234, int, "base seed for all randomness"),
    "phase_noise": (True, _parse_bool, "synthesize with phase noise"),
    "variant": ("pavbem", str,
                "estimator: pavbem, pavbem_relaxed, prvbem, beamforming"),
    "max_iterations": (200, int, "outer iteration cap"),
    "convergence_tol": (1e-6, float, "max-norm tolerance on <z> change"),
    "estimate_noise": (True, _parse_bool, "re-estimate sigma^2 each iteration"),
    "initial_noise_var": (None, _parse_optional_float,
                          "starting sigma^2, 'auto' scales from the data"),
    "relax_iterations": (25, int,
                         "leading iterations with occupancy clamped to 1"),
    "order": ("energy", str, "atom sweep order: energy or index"),
    "k_values": ((2, 5), _parse_int_list, "source counts swept"),
    "noise_grid": ((), _parse_float_list,
                   "explicit sigma^2 grid, comma separated"),
    "noise_grid_spec": ("log:1e-3:1:8", str,
                        "log:start:stop:count, used when noise_grid is empty"),
    "n_trials": (50, int, "Monte Carlo trials per cell"),
    "algorithms": (("beamforming", "prvbem", "pavbem_relaxed", "pavbem"),
                   _parse_str_list, "algorithms run by the sweep, in order"),
    "workers": (0, int, "parallel trial workers; 0 reads PHASEDOA_WORKERS"),
    "output_dir": (".", str, "directory for output files"),
}


def defaults():
    return {key: spec[0] for key, spec in SCHEMA.items()}


def coerce(key, text):
    if key not in SCHEMA:
        raise ConfigError("unknown config key: %s" % key)
    parser = SCHEMA[key][1]
    try:
        return parser(text)
    except (ValueError, TypeError) as exc:
        raise ConfigError("bad value for %s: %s" % (key, exc)) from exc


def parse_config(path):
    """Read a flat key=value file. '#' starts a comment, blank lines are
    skipped, later assignments win."""
    values = defaults()
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc)) from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("%s:%d: expected key = value" % (path, lineno))
        key, text = (part.strip() for part in line.split("=", 1))
        values[key] = coerce(key, text)
    return values


def merge_overrides(values, overrides):
    """Apply CLI overrides (already typed, None meaning not given)."""
    merged = dict(values)
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in SCHEMA:
            raise ConfigError("unknown config key: %s" % key)
        merged[key] = value
    return merged


def resolve_noise_grid(values):
    if values["noise_grid"]:
        grid = tuple(float(v) for v in values["noise_grid"])
    else:
        spec = values["noise_grid_spec"]
        parts = spec.split(":")
        if len(parts) != 4 or parts[0] != "log":
            raise ConfigError(
                "bad noise_grid_spec %r, expected log:start:stop:count" % spec)
        try:
            start, stop, count = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError as exc:
            raise ConfigError("bad noise_grid_spec %r: %s" % (spec, exc)) from exc
        if start <= 0 or stop <= 0 or count < 1:
            raise ConfigError("noise_grid_spec needs positive bounds and count")
        grid = tuple(np.logspace(np.log10(start), np.log10(stop), count))
    if any(v <= 0 for v in grid):
        raise ConfigError("noise_grid values must be positive")
    return grid


def resolve_workers(values):
    workers = values["workers"]
    if workers >= 1:
        return workers
    env = os.environ.get("PHASEDOA_WORKERS", "")
    if env:
        try:
            parsed = int(env)
        except ValueError as exc:
            raise ConfigError("PHASEDOA_WORKERS must be an integer") from exc
        if parsed >= 1:
            return parsed
    return 1


def help_lines():
    """One line per config key for the CLI --help epilog."""
    out = []
    for key, (default, _, text) in SCHEMA.items():
        if isinstance(default, tuple):
            shown = ",".join(str(v) for v in default) if default else "(empty)"
        elif default is None:
            shown = "auto"
        else:
            shown = str(default)
        out.append("  %-18s %s (default: %s)" % (key, text, shown))
    return out
