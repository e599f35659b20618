"""Fluid-antenna channel model: correlation factor, derived parameters and
the reference/port SNR densities.

All M ports share a common Rayleigh reference channel; each port channel
mixes the reference with an independent component through the correlation
factor mu, so a port SNR conditioned on the reference SNR follows a
noncentral chi-square (Rician power) law with 2 degrees of freedom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import specfun
from .errors import DegenerateCorrelation, NumericalInstability

# Radicand / unit-interval clamp width for the correlation factor; matches
# the accuracy level of the underlying special functions.
_MU_CLAMP = 1e-12


@dataclass(frozen=True)
class SystemConfig:
    """Physical scenario.

    M      total ports
    K      activated (combined) ports, 1 <= K <= M
    W      normalized linear aperture in wavelengths
    R      data rate in bit/s/Hz
    phi    average received SNR, linear scale (transmit power, path gain and
           noise power enter only through this ratio)
    """

    M: int
    K: int
    W: float
    R: float
    phi: float

    def __post_init__(self):
        if self.M < 1:
            raise ValueError(f"M must be >= 1, got {self.M}")
        if not 1 <= self.K <= self.M:
            raise ValueError(f"K must satisfy 1 <= K <= M, got K={self.K}, M={self.M}")
        if self.W <= 0:
            raise ValueError(f"W must be > 0, got {self.W}")
        if self.R <= 0:
            raise ValueError(f"R must be > 0, got {self.R}")
        if self.phi <= 0:
            raise ValueError(f"phi must be > 0, got {self.phi}")


@dataclass(frozen=True)
class DerivedParams:
    """Quantities derived once from a SystemConfig.

    mu     correlation factor in [0, 1]
    omega  1 / (phi * (1 - mu)), the conditional-density rate (inf if mu = 1)
    z      outage SNR threshold 2**R - 1
    T      M - K - 1; negative when K = M (analytic paths then refuse)
    """

    mu: float
    omega: float
    z: float
    T: int


def correlation_mu(W: float) -> float:
    """Correlation factor mu(W) between any port channel and the reference.

    mu = sqrt(2) * sqrt(F(W) - J1(2 pi W) / (2 pi W)) where F is the
    aperture hypergeometric term.  The radicand is mathematically in
    [0, 1/2] but can round just outside; values within 1e-12 of the valid
    range are clamped, anything further out signals a special-function
    defect rather than a user error.
    """
    if W <= 0:
        raise ValueError(f"W must be > 0, got {W}")
    x = 2.0 * math.pi * W
    radicand = specfun.hyp1f2_half(W) - specfun.bessel_j1(x) / x
    if radicand < -_MU_CLAMP:
        raise NumericalInstability(
            f"correlation radicand {radicand:.3e} < -{_MU_CLAMP} at W={W}")
    mu = math.sqrt(2.0 * max(radicand, 0.0))
    if mu > 1.0 + _MU_CLAMP:
        raise NumericalInstability(f"correlation factor {mu} > 1 at W={W}")
    return min(mu, 1.0)


def derive_params(cfg: SystemConfig) -> DerivedParams:
    """mu, omega, z, T for a scenario.

    T may be negative here (K = M); consumers that need the (K+1)-th order
    statistic check it themselves.
    """
    mu = correlation_mu(cfg.W)
    omega = math.inf if mu >= 1.0 else 1.0 / (cfg.phi * (1.0 - mu))
    z = 2.0 ** cfg.R - 1.0
    return DerivedParams(mu=mu, omega=omega, z=z, T=cfg.M - cfg.K - 1)


def ref_snr_pdf(x: float, phi: float) -> float:
    """Density of the reference-port SNR: exponential with mean phi."""
    if x < 0:
        return 0.0
    return math.exp(-x / phi) / phi


def _require_nondegenerate(p: DerivedParams):
    if p.mu >= 1.0:
        raise DegenerateCorrelation(
            "mu = 1: port SNRs are a point mass at the reference SNR")


def log_port_pdf_conditional(x: float, x0: float, p: DerivedParams) -> float:
    """log of :func:`port_pdf_conditional`; -inf where the density is 0."""
    _require_nondegenerate(p)
    if x < 0:
        return -math.inf
    w = p.omega
    arg = 2.0 * w * math.sqrt(p.mu * x0 * x)
    # e^{-w(x + mu x0)} I0(arg) via the scaled Bessel: the unscaled I0
    # overflows once arg > ~700 even though the density itself is tame.
    return math.log(w) - w * (x + p.mu * x0) + arg \
        + math.log(specfun.bessel_i0e(arg))


def port_pdf_conditional(x: float, x0: float, p: DerivedParams) -> float:
    """Density of a port SNR given the reference SNR equals x0.

    Noncentral chi-square power law with noncentrality mu*x0 and rate
    omega: omega * e^{-omega (x + mu x0)} * I0(2 omega sqrt(mu x0 x)).
    """
    return math.exp(log_port_pdf_conditional(x, x0, p))


def port_cdf_conditional(v: float, x0: float, p: DerivedParams) -> float:
    """Pr(port SNR <= v | reference SNR = x0), in [0, 1].

    Equals 1 - Q1(sqrt(2 omega mu x0), sqrt(2 omega v)); evaluated by the
    complement series directly so small probabilities keep full relative
    accuracy.
    """
    _require_nondegenerate(p)
    if v <= 0:
        return 0.0
    a = math.sqrt(2.0 * p.omega * p.mu * x0)
    b = math.sqrt(2.0 * p.omega * v)
    return specfun.marcum_q1c(a, b)
