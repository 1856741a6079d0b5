"""Variational phase posterior q(theta) and circular moments.

The E-step for the phase reduces to a Gaussian chain with tridiagonal prior
precision, observed through per-sensor pseudo-measurements arg(eta_n) with
precision 2|eta_n|/sigma^2. The posterior mean and marginal variances come
out of a standard Kalman filter plus RTS smoother over the AR(1) state.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import i0e, i1e


@dataclass
class PhasePrecision:
    """Symmetric tridiagonal precision, stored as two bands."""

    diagonal: np.ndarray
    off_diagonal: np.ndarray


@dataclass
class PseudoObservations:
    values: np.ndarray      # arg(eta_n) in (-pi, pi]
    precisions: np.ndarray  # 2|eta_n|/sigma^2, zero marks a missing sensor


@dataclass
class PhasePosterior:
    means: np.ndarray
    marginal_variances: np.ndarray
    circular_moments: np.ndarray  # <exp(j*theta_n)>


def prior_precision(model, n):
    """Tridiagonal prior precision of (theta_1, ..., theta_n).

    diagonal [1/s1 + a^2/st, (1+a^2)/st, ..., (1+a^2)/st, 1/st],
    off-diagonal -a/st, with s1 = sigma_1_sq and st = sigma_theta_sq.
    """
    if n < 2:
        raise ValueError("chain precision needs n >= 2")
    st = model.sigma_theta_sq
    a = model.a
    diag = np.full(n, (1 + a * a) / st)
    diag[0] = 1 / model.sigma_1_sq + a * a / st
    diag[-1] = 1 / st
    off = np.full(n - 1, -a / st)
    return PhasePrecision(diagonal=diag, off_diagonal=off)


def prior_marginals(model, n):
    """Marginal variances of the unconditioned chain: v_1 = sigma_1_sq,
    v_k = a^2 v_{k-1} + sigma_theta_sq."""
    v = np.empty(n)
    v[0] = model.sigma_1_sq
    a2 = model.a * model.a
    for i in range(1, n):
        v[i] = a2 * v[i - 1] + model.sigma_theta_sq
    return v


def compute_eta(y, dictionary, z_means):
    """eta_n = y_n * conj((D <z>)_n); its argument and 2|eta|/sigma^2 act as
    the pseudo-observation and precision for the phase chain."""
    return y * np.conj(dictionary.columns @ z_means)


def pseudo_observations(eta, noise_var):
    # arg(0) = 0 by numpy convention; harmless since the precision is 0 there
    return PseudoObservations(values=np.angle(eta),
                              precisions=2 * np.abs(eta) / noise_var)


def smooth(pseudo, model):
    """Posterior means and marginal variances of the phase chain.

    Information form: precision = prior_precision + diag(pseudo.precisions),
    information vector = pseudo.precisions * pseudo.values. Realized as a
    forward Kalman filter over theta_n = a*theta_{n-1} + w_n followed by an
    RTS backward pass; a zero pseudo-precision contributes no update.
    """
    v = np.asarray(pseudo.values, dtype=float)
    lam = np.asarray(pseudo.precisions, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("pseudo-observation values must be finite")
    n = v.shape[0]
    a = model.a
    st = model.sigma_theta_sq

    if n == 1:
        prec = 1 / model.sigma_1_sq + lam[0]
        var = 1 / prec
        mean = var * lam[0] * v[0]
        return _with_moments(np.array([mean]), np.array([var]))

    mp = np.empty(n)  # predicted mean
    pp = np.empty(n)  # predicted variance
    mf = np.empty(n)  # filtered mean
    pf = np.empty(n)  # filtered variance
    for t in range(n):
        if t == 0:
            mp[t] = 0.0
            pp[t] = model.sigma_1_sq
        else:
            mp[t] = a * mf[t - 1]
            pp[t] = a * a * pf[t - 1] + st
        # gain written as p*lam/(p*lam + 1) so lam = 0 reduces to no update
        g = pp[t] * lam[t] / (pp[t] * lam[t] + 1.0)
        mf[t] = mp[t] + g * (v[t] - mp[t])
        pf[t] = (1.0 - g) * pp[t]

    ms = np.empty(n)
    ps = np.empty(n)
    ms[-1] = mf[-1]
    ps[-1] = pf[-1]
    for t in range(n - 2, -1, -1):
        c = pf[t] * a / pp[t + 1]
        ms[t] = mf[t] + c * (ms[t + 1] - mp[t + 1])
        ps[t] = pf[t] + c * c * (ps[t + 1] - pp[t + 1])
    return _with_moments(ms, ps)


def noninformative_posterior(pseudo):
    """Phase posterior when the chain prior is dropped (flat phase prior):
    each sensor stands alone, m_n = arg(eta_n), Sigma_n = 1/precision_n.
    The circular moment needs only the precision, so eta_n = 0 cleanly
    yields a zero moment."""
    lam = np.asarray(pseudo.precisions, dtype=float)
    with np.errstate(divide="ignore"):
        variances = 1.0 / lam  # inf where the pseudo-precision vanishes
    moments = bessel_ratio(lam) * np.exp(1j * pseudo.values)
    return PhasePosterior(means=np.asarray(pseudo.values, dtype=float),
                          marginal_variances=variances,
                          circular_moments=moments)


def _with_moments(means, variances):
    moments = bessel_ratio(1.0 / variances) * np.exp(1j * means)
    return PhasePosterior(means=means, marginal_variances=variances,
                          circular_moments=moments)


def bessel_ratio(x):
    """I_1(x)/I_0(x) for x >= 0, stable up to at least 1e8.

    Uses the exponentially scaled Bessel functions so neither factor
    overflows (raw I_0 blows up near x = 700).
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x < 0):
        raise ValueError("bessel_ratio requires finite x >= 0")
    out = i1e(x) / i0e(x)
    return out if out.ndim else float(out)


def circular_moment(mean, variance):
    """<exp(j*theta)> under the Von Mises matched to N(mean, variance):
    (I_1/I_0)(1/variance) * exp(j*mean)."""
    variance = np.asarray(variance, dtype=float)
    if np.any(variance <= 0) or np.any(np.isnan(variance)):
        raise ValueError("variance must be positive")
    out = bessel_ratio(1.0 / variance) * np.exp(1j * np.asarray(mean, dtype=float))
    return out if out.ndim else complex(out)
