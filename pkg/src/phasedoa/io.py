"""Columnar text serialization for observations and ground truths.

One line per element: real, imag and optionally theta, written with %.17g
so a read-back reproduces every float bit for bit.
"""

import numpy as np


def save_observation(path, y, theta=None):
    y = np.asarray(y, dtype=complex)
    if theta is not None:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != y.shape:
            raise ValueError("theta length does not match observation length")
    with open(path, "w") as fh:
        if theta is None:
            fh.write("# real imag\n")
            for v in y:
                fh.write("%.17g %.17g\n" % (v.real, v.imag))
        else:
            fh.write("# real imag theta\n")
            for v, t in zip(y, theta):
                fh.write("%.17g %.17g %.17g\n" % (v.real, v.imag, t))
    return path


def load_observation(path):
    """Returns (y, theta) where theta is None for two-column files."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] not in (2, 3):
        raise ValueError("%s: expected 2 or 3 columns, found %d"
                         % (path, data.shape[1]))
    y = data[:, 0] + 1j * data[:, 1]
    theta = data[:, 2] if data.shape[1] == 3 else None
    return y, theta


def save_ground_truth(path, z):
    return save_observation(path, np.asarray(z, dtype=complex))


def load_ground_truth(path):
    z, _ = load_observation(path)
    return z
