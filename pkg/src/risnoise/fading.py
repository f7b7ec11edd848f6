"""Cascaded Nakagami-m fading statistics for the RIS link.

The coherently combined signal amplitude is D = sum_n |g_bn| |g_nd| over the
N elements; the RIS noise reaches the receiver through Y = sum_n |g_nd|^2.
D has no closed-form density, so the package uses the standard first/second
moment match of D onto a Gamma(delta, zeta) shape/scale pair.  Y is exactly
Gamma(N*m_nd, omega_nd/m_nd) since each |g_nd|^2 is Gamma(m_nd, omega_nd/m_nd).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special


def _check_hop(name: str, m: float, omega: float) -> None:
    if m < 0.5:
        raise ValueError(f"{name}: Nakagami shape must be >= 0.5, got {m!r}")
    if omega <= 0.0:
        raise ValueError(f"{name}: mean channel power must be positive, got {omega!r}")


def _check_n(n: int) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"element count must be a positive integer, got {n!r}")


def amplitude_mean_factor(m: float) -> float:
    """E|g| / sqrt(omega/m) = Gamma(m + 1/2) / Gamma(m) for Nakagami-m."""
    return math.exp(math.lgamma(m + 0.5) - math.lgamma(m))


def cascade_moments(n: int, m_bn: float, m_nd: float,
                    omega_bn: float, omega_nd: float) -> tuple[float, float]:
    """Mean and variance of the cascade sum D = sum_n |g_bn| |g_nd|.

    Element products are i.i.d., so the mean and variance are N times the
    per-element values:
      E[|g_bn||g_nd|]   = g * sqrt(omega_bn*omega_nd/(m_bn*m_nd)),
      Var[|g_bn||g_nd|] = omega_bn*omega_nd * (1 - g^2/(m_bn*m_nd)),
    with g = Gamma(m_bn+1/2)Gamma(m_nd+1/2)/(Gamma(m_bn)Gamma(m_nd)).
    """
    _check_n(n)
    _check_hop("bn hop", m_bn, omega_bn)
    _check_hop("nd hop", m_nd, omega_nd)
    g = amplitude_mean_factor(m_bn) * amplitude_mean_factor(m_nd)
    mu = g * math.sqrt(omega_bn * omega_nd / (m_bn * m_nd)) * n
    sigma2 = n * omega_bn * omega_nd * (1.0 - g * g / (m_bn * m_nd))
    return mu, sigma2


@dataclass(frozen=True)
class CascadeApprox:
    """Moment-matched Gamma(delta, zeta) approximation of the cascade sum D.

    delta is the real-valued shape mu^2/sigma^2 and zeta the scale sigma^2/mu.
    delta_int is the shape rounded half-up and clamped to >= 1; the series
    form of the signal-outage factor requires an integer shape, everything
    else uses the real delta.
    """
    mu: float
    sigma2: float
    delta: float
    zeta: float
    delta_int: int


def gamma_approx(mu: float, sigma2: float) -> CascadeApprox:
    """Match a Gamma(delta, zeta) shape/scale pair to a given mean and variance."""
    if mu <= 0.0 or sigma2 <= 0.0:
        raise ValueError(f"moments must be positive, got mu={mu!r} sigma2={sigma2!r}")
    delta = mu * mu / sigma2
    zeta = sigma2 / mu
    delta_int = max(1, math.floor(delta + 0.5))
    return CascadeApprox(mu=mu, sigma2=sigma2, delta=delta, zeta=zeta,
                         delta_int=delta_int)


def cascade_approx(n: int, m_bn: float, m_nd: float,
                   omega_bn: float, omega_nd: float) -> CascadeApprox:
    return gamma_approx(*cascade_moments(n, m_bn, m_nd, omega_bn, omega_nd))


def cdf_X(x, approx: CascadeApprox):
    """CDF of the combined signal power X = D^2 under the Gamma approximation.

    P(X <= x) = P(D <= sqrt(x)) = gammainc_reg(delta, sqrt(x)/zeta).
    Accepts scalars or arrays; x < 0 maps to 0.
    """
    x = np.asarray(x, dtype=float)
    arg = np.sqrt(np.maximum(x, 0.0)) / approx.zeta
    out = special.gammainc(approx.delta, arg)
    if out.ndim == 0:
        return float(out)
    return out


def y_gamma_params(n: int, m_nd: float, omega_nd: float) -> tuple[float, float]:
    """Exact Gamma(shape, rate) parameters of Y = sum_n |g_nd|^2."""
    _check_n(n)
    _check_hop("nd hop", m_nd, omega_nd)
    return n * m_nd, m_nd / omega_nd


def pdf_Y(y, n: int, m_nd: float, omega_nd: float):
    """Exact density of the RIS-side power sum Y (scalar or array input)."""
    shape, rate = y_gamma_params(n, m_nd, omega_nd)
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    pos = y > 0.0
    with np.errstate(divide="ignore"):
        logpdf = (shape * math.log(rate) - math.lgamma(shape)
                  + (shape - 1.0) * np.log(y[pos]) - rate * y[pos])
    out[pos] = np.exp(logpdf)
    if shape == 1.0:
        out = np.where(y == 0.0, rate, out)
    elif shape < 1.0:
        out = np.where(y == 0.0, np.inf, out)
    if out.ndim == 0:
        return float(out)
    return out


def sample_nakagami(rng: np.random.Generator, m: float, omega: float, size=None):
    """Draw Nakagami-m amplitudes: |g| = sqrt(W), W ~ Gamma(m, omega/m)."""
    _check_hop("hop", m, omega)
    return np.sqrt(rng.gamma(shape=m, scale=omega / m, size=size))
