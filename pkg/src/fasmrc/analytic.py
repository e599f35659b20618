"""Exact outage pipeline via Laplace transforms and Gauss-Chebyshev sums.

The outage probability of best-K MRC decomposes, conditioned on the
reference SNR x0 and on the (K+1)-th largest port SNR v, into

* Psi(v, x0): all T = M-K-1 remaining ports stay below v;
* Phi(z, v, x0): the K selected branches each exceed v yet sum to at most z;

weighted by the single-port conditional density at v and the reference
density at x0, times the selection multiplicity C(M, K) * (M - K).

Phi is obtained by expanding the conditional branch density in powers of
the noncentrality, transforming each term in closed form (LT of
x^a e^{-bx} u(x - v)), raising the truncated transform to the K-th power by
sparse trivariate polynomial convolution, and inverting term by term into
incomplete-gamma form.  The two outer integrals are evaluated with
Gauss-Chebyshev rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import i0e, logsumexp

from . import specfun
from .channel import DerivedParams, SystemConfig, derive_params
from .errors import (DegenerateCorrelation, NumericalInstability,
                     QuadratureNonconvergence, TermExplosion,
                     TruncationFailure, UnsupportedConfiguration)
from .results import OutageEstimate
from .specfun import LOG_ZERO, LogValue

_PHI_UPPER_SLACK = math.log1p(1e-9)  # tolerated rounding above probability 1


@dataclass(frozen=True)
class SeriesTruncation:
    """Truncation policy for the noncentrality series.

    n_max     total-order cap: terms whose combined x0-power exceeds n_max
              are dropped (applies to the branch transform and to the
              K-fold product alike)
    tail_tol  relative tail tolerance; evaluations raise TruncationFailure
              when the geometric tail estimate exceeds it
    term_cap  hard cap on sparse-product term count
    """

    n_max: int = 40
    tail_tol: float = 1e-8
    term_cap: int = 2_000_000

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")
        if self.tail_tol <= 0:
            raise ValueError("tail_tol must be > 0")
        if self.term_cap < 1:
            raise ValueError("term_cap must be >= 1")


@dataclass(frozen=True)
class QuadratureConfig:
    """Gauss-Chebyshev setup for the double outage integral.

    h    outer-integral cutoff; None selects phi * ln(1e10), which bounds
         the discarded reference-SNR tail mass at ~1e-10
    u_p  node count for the reference-SNR (outer) integral
    u_l  node count for the selection-threshold (inner) integral

    The rule converges at second order in the node counts (the effective
    integrand carries sqrt(1-t^2) endpoint factors), and the outer
    integrand varies over ~ln(1e10) decay lengths, so u_p needs roughly
    4x more nodes than u_l for comparable error; the defaults hold the
    relative discretization error near 3e-5.
    """

    h: float | None = None
    u_p: int = 400
    u_l: int = 100

    def __post_init__(self):
        if self.h is not None and self.h <= 0:
            raise ValueError("h must be > 0")
        if self.u_p < 1 or self.u_l < 1:
            raise ValueError("node counts must be >= 1")

    def resolve_h(self, phi: float) -> float:
        return self.h if self.h is not None else phi * math.log(1e10)


def selection_multiplicity(M: int, K: int) -> int:
    """C(M, K) * (M - K): ways to pick the K active ports times the choice
    of which idle port carries the (K+1)-th maximum."""
    if not 1 <= K <= M - 1:
        raise UnsupportedConfiguration(
            f"selection multiplicity needs 1 <= K <= M-1, got K={K}, M={M}")
    return math.comb(M, K) * (M - K)


# ---------------------------------------------------------------------------
# Theorem-style closed-form transforms and their numerical oracle
# ---------------------------------------------------------------------------

def lt_closed_form_g(a: int, b: float, v: float, s: float) -> float:
    """Laplace transform of g(x) = x^a e^{-bx} u(x - v) for integer a >= 0:

        e^{-(s+b)v} * sum_{l=0}^{a} a! v^l / (l! (s+b)^{a+1-l})

    Requires s > -b so the transform integral converges.
    """
    if a < 0 or int(a) != a:
        raise ValueError("a must be a nonnegative integer")
    if v < 0:
        raise ValueError("v must be >= 0")
    if s <= -b:
        raise ValueError(f"need s > -b, got s={s}, b={b}")
    sb = s + b
    fa = math.factorial(int(a))
    total = math.fsum(fa * v ** l / (math.factorial(l) * sb ** (a + 1 - l))
                      for l in range(int(a) + 1))
    return math.exp(-sb * v) * total


def lt_closed_form_p(K: int, a: float, b: float, s: float) -> float:
    """Laplace transform of p(x) = (x-a)^{K-1} e^{-bx} u(x - a):

        (K-1)! e^{-a(s+b)} / (s+b)^K

    Requires s > -b.
    """
    if K < 1 or int(K) != K:
        raise ValueError("K must be a positive integer")
    if a < 0:
        raise ValueError("a must be >= 0")
    if s <= -b:
        raise ValueError(f"need s > -b, got s={s}, b={b}")
    sb = s + b
    return math.factorial(int(K) - 1) * math.exp(-a * sb) / sb ** K


def laplace_numeric(f, s: float, points=None, rel_tol: float = 1e-9) -> float:
    """Adaptive quadrature of the Laplace integral of f at s.

    `points` lists known discontinuities of f (e.g. a step location); the
    integration is split there.  Raises QuadratureNonconvergence when the
    combined error estimate exceeds rel_tol relative to the result.
    """
    breaks = sorted(p for p in (points or []) if p > 0)
    edges = [0.0, *breaks, math.inf]

    def integrand(x):
        fx = f(x)
        # for negative s the kernel alone overflows far in the tail even
        # though the product has already underflowed; 0 * exp(huge) is 0
        if fx == 0.0:
            return 0.0
        return fx * math.exp(-s * x)

    total = 0.0
    err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, e = integrate.quad(integrand, lo, hi,
                                limit=300, epsabs=1e-14, epsrel=1e-11)
        total += val
        err += e
    if err > max(rel_tol * abs(total), 1e-13):
        raise QuadratureNonconvergence(
            f"Laplace quadrature error {err:.2e} exceeds target for s={s}")
    return total


# ---------------------------------------------------------------------------
# idle-port probability
# ---------------------------------------------------------------------------

def psi_exact(v: float, x0: float, T: int, p: DerivedParams) -> float:
    """Pr(all T idle ports <= v | reference SNR x0): the conditional CDF of
    one port raised to the T-th power (ports are conditionally i.i.d.)."""
    if T < 0:
        raise ValueError("T must be >= 0")
    if T == 0:
        return 1.0
    if v <= 0:
        return 0.0
    if p.mu >= 1.0:
        raise DegenerateCorrelation("mu = 1 not supported by the analytic path")
    a = math.sqrt(2.0 * p.omega * p.mu * x0)
    b = math.sqrt(2.0 * p.omega * v)
    return specfun.marcum_q1c(a, b) ** T


# ---------------------------------------------------------------------------
# sparse trivariate transform polynomials
# ---------------------------------------------------------------------------

@dataclass
class SparseLtPolynomial:
    """Truncated branch transform (or a K-fold product of branches).

    Represents  e^{-k1 v (s+w) - k2 w mu x0} * sum coef * x0^a v^b (s+w)^-c
    with w the conditional rate; term keys are (a, b, c) and coefficients
    are positive log-domain values.  Coefficients are independent of both
    x0 and v, so one polynomial serves every evaluation point.

    v_exp_scale / x0_exp_scale are the prefactor multipliers k1, k2 (both
    equal the number of branch factors folded in).  restriction_v records
    the support restriction x > v the transform was built for; evaluation
    uses it as the default v.
    """

    terms: dict[tuple[int, int, int], LogValue]
    v_exp_scale: int
    x0_exp_scale: int
    restriction_v: float
    n_max: int

    def copy(self) -> "SparseLtPolynomial":
        return SparseLtPolynomial(dict(self.terms), self.v_exp_scale,
                                  self.x0_exp_scale, self.restriction_v,
                                  self.n_max)

    def arrays(self):
        """Term keys and log-coefficients as flat numpy arrays."""
        keys = list(self.terms.keys())
        a = np.array([k[0] for k in keys], dtype=np.int64)
        b = np.array([k[1] for k in keys], dtype=np.int64)
        c = np.array([k[2] for k in keys], dtype=np.int64)
        logcoef = np.array([self.terms[k].log_magnitude for k in keys])
        return a, b, c, logcoef

    def evaluate(self, s: float, x0: float, p: DerivedParams,
                 v: float | None = None,
                 trunc: SeriesTruncation | None = None) -> float:
        """Numeric value of the transform at (s, x0), restricted to x > v.

        With `trunc` given, the truncation tail is estimated by geometric
        extrapolation of the last retained x0-order and TruncationFailure
        is raised when it exceeds tail_tol.
        """
        w = p.omega
        if s <= -w:
            raise ValueError(f"need s > -omega, got s={s}, omega={w}")
        if v is None:
            v = self.restriction_v
        a, b, c, logcoef = self.arrays()
        log_x0 = math.log(x0) if x0 > 0 else LOG_ZERO
        log_v = math.log(v) if v > 0 else LOG_ZERO
        log_sw = math.log(s + w)
        with np.errstate(invalid="ignore"):
            lt = logcoef + np.where(a == 0, 0.0, a * log_x0) \
                + np.where(b == 0, 0.0, b * log_v) - c * log_sw
        total = logsumexp(lt)
        if trunc is not None and p.mu > 0.0 and x0 > 0.0:
            tail = _geometric_tail(
                _order_logsum(lt, a, self.n_max),
                _order_logsum(lt, a, self.n_max - 1), total)
            if not tail <= trunc.tail_tol:
                raise TruncationFailure(
                    f"transform tail estimate {tail:.2e} exceeds "
                    f"{trunc.tail_tol:.0e} at n_max={self.n_max}")
        prefactor = -self.v_exp_scale * (s + w) * v \
            - self.x0_exp_scale * w * p.mu * x0
        return math.exp(total + prefactor)


def _order_logsum(log_terms: np.ndarray, orders: np.ndarray, order: int) -> float:
    if order < 0:
        return LOG_ZERO
    mask = orders == order
    if not mask.any():
        return LOG_ZERO
    return float(logsumexp(log_terms[mask]))


def _geometric_tail(log_last: float, log_prev: float, log_total: float) -> float:
    """Relative tail bound from the last two retained series orders.

    Models orders beyond the cap as a geometric sequence with the observed
    ratio r = S_last / S_prev; returns inf when the series has not started
    decaying, which callers turn into TruncationFailure.
    """
    if log_last == LOG_ZERO:
        return 0.0
    if log_total == LOG_ZERO:
        return math.inf
    r = math.exp(min(log_last - log_prev, -1e-12)) if log_prev > LOG_ZERO \
        else math.inf
    if not r < 1.0:
        return math.inf
    return math.exp(log_last - log_total) * r / (1.0 - r)


def branch_lt(trunc: SeriesTruncation, v: float,
              p: DerivedParams) -> SparseLtPolynomial:
    """Transform of one conditional branch density restricted to x > v.

    Expanding the Bessel factor of the conditional density in powers of the
    noncentrality and transforming term by term gives, up to the prefactor
    e^{-(s+w)v - w mu x0}, the double sum over m <= n_max, l <= m of

        d_m x0^m v^l / (l! (s+w)^{m+1-l}),   d_m = w^{2m+1} mu^m / m!.
    """
    if v < 0:
        raise ValueError("v must be >= 0")
    if p.mu >= 1.0 or not math.isfinite(p.omega):
        raise DegenerateCorrelation("mu = 1 not supported by the analytic path")
    w = p.omega
    log_w = math.log(w)
    log_mu = math.log(p.mu) if p.mu > 0 else LOG_ZERO
    terms: dict[tuple[int, int, int], LogValue] = {}
    for m in range(trunc.n_max + 1):
        if p.mu == 0.0 and m > 0:
            break
        log_dm = (2 * m + 1) * log_w + (m * log_mu if m else 0.0) \
            - specfun.log_factorial(m)
        for l in range(m + 1):
            terms[(m, l, m + 1 - l)] = LogValue.from_log(
                log_dm - specfun.log_factorial(l), 1)
    return SparseLtPolynomial(terms, 1, 1, v, trunc.n_max)


def lt_power_k(branch: SparseLtPolynomial, K: int,
               trunc: SeriesTruncation) -> SparseLtPolynomial:
    """K-fold product of a branch transform by sparse convolution.

    Terms whose total x0-power would exceed n_max are dropped (they are the
    truncated series orders); prefactor scales add up so the product keeps
    the e^{-Kv(s+w) - K w mu x0} form.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    result = branch.copy()
    for _ in range(K - 1):
        result = _convolve(result, branch, trunc)
    return result


def _convolve(lhs: SparseLtPolynomial, rhs: SparseLtPolynomial,
              trunc: SeriesTruncation) -> SparseLtPolynomial:
    n_max = trunc.n_max
    out: dict[tuple[int, int, int], float] = {}
    rhs_items = [(k, val.log_magnitude) for k, val in rhs.terms.items()]
    for (a1, b1, c1), lhs_val in lhs.terms.items():
        lm1 = lhs_val.log_magnitude
        for (a2, b2, c2), lm2 in rhs_items:
            a = a1 + a2
            if a > n_max:
                continue
            key = (a, b1 + b2, c1 + c2)
            lm = lm1 + lm2
            prev = out.get(key)
            out[key] = lm if prev is None else float(np.logaddexp(prev, lm))
        if len(out) > trunc.term_cap:
            raise TermExplosion(
                f"sparse product exceeded {trunc.term_cap} terms")
    terms = {k: LogValue.from_log(lm, 1) for k, lm in out.items()}
    return SparseLtPolynomial(terms, lhs.v_exp_scale + rhs.v_exp_scale,
                              lhs.x0_exp_scale + rhs.x0_exp_scale,
                              lhs.restriction_v, n_max)


@lru_cache(maxsize=64)
def _kfold_poly(omega: float, mu: float, K: int, n_max: int,
                tail_tol: float, term_cap: int) -> SparseLtPolynomial:
    trunc = SeriesTruncation(n_max=n_max, tail_tol=tail_tol, term_cap=term_cap)
    p = DerivedParams(mu=mu, omega=omega, z=0.0, T=0)
    return lt_power_k(branch_lt(trunc, 0.0, p), K, trunc)


# ---------------------------------------------------------------------------
# Phi: K selected branches above v with sum at most z
# ---------------------------------------------------------------------------

def _phi_grid(poly: SparseLtPolynomial, z: float, v_nodes: np.ndarray,
              x0_nodes: np.ndarray, p: DerivedParams,
              trunc: SeriesTruncation) -> tuple[np.ndarray, float]:
    """Phi(z, v, x0) over a v-grid and an x0-grid; returns (matrix, max tail).

    Every inverted term is positive:
        coef * x0^a v^b * P(c, w(z - Kv)) / w^c
    times e^{-wK(v + mu x0)}, with P the regularized lower incomplete gamma;
    the sum is assembled with log-sum-exp.  Requires z >= K*v on all nodes.
    """
    K = poly.v_exp_scale
    w = p.omega
    a, b, c, logcoef = poly.arrays()
    v_nodes = np.asarray(v_nodes, dtype=float)
    x0_nodes = np.asarray(x0_nodes, dtype=float)
    y = w * (z - K * v_nodes)
    if np.any(y < 0):
        raise ValueError("phi grid requires z >= K*v at every node")

    c_max = int(c.max())
    log_p_rows = specfun.log_gammainc_int_grid(c_max, y)  # (c_max, n_v)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_v = np.where(v_nodes > 0, np.log(v_nodes), LOG_ZERO)
        log_x0 = np.where(x0_nodes > 0, np.log(x0_nodes), LOG_ZERO)
    log_w = math.log(w)

    # per-term, per-v-node pieces that do not involve x0
    with np.errstate(invalid="ignore"):
        base = (logcoef[:, None]
                + np.where(b[:, None] == 0, 0.0, b[:, None] * log_v[None, :])
                + log_p_rows[c - 1, :]
                - (c * log_w)[:, None]
                - (w * K) * v_nodes[None, :])      # (n_terms, n_v)

    mask_last = a == poly.n_max
    mask_prev = a == poly.n_max - 1

    n_x0 = x0_nodes.size
    phi = np.empty((n_x0, v_nodes.size))
    tail_max = 0.0
    with np.errstate(invalid="ignore"):
        ax_all = np.where(a[:, None] == 0, 0.0,
                          a[:, None] * log_x0[None, :])  # (n_terms, n_x0)
    for i in range(n_x0):
        lt = base + ax_all[:, i][:, None]
        log_total = logsumexp(lt, axis=0)
        if p.mu > 0.0 and x0_nodes[i] > 0.0 and poly.n_max >= 1:
            log_last = logsumexp(lt[mask_last], axis=0) if mask_last.any() \
                else np.full(v_nodes.size, LOG_ZERO)
            log_prev = logsumexp(lt[mask_prev], axis=0) if mask_prev.any() \
                else np.full(v_nodes.size, LOG_ZERO)
            tails = [_geometric_tail(ll, lp, lt_)
                     for ll, lp, lt_ in zip(log_last, log_prev, log_total)]
            tail_max = max(tail_max, max(tails))
        elif p.mu > 0.0 and x0_nodes[i] > 0.0 and poly.n_max == 0:
            tail_max = math.inf
        log_phi_row = log_total - w * K * p.mu * x0_nodes[i]
        if np.any(log_phi_row > _PHI_UPPER_SLACK):
            raise NumericalInstability(
                f"Phi value exp({log_phi_row.max():.3e}) exceeds 1")
        phi[i] = np.exp(np.minimum(log_phi_row, 0.0))
    if not tail_max <= trunc.tail_tol:
        raise TruncationFailure(
            f"Phi series tail estimate {tail_max:.2e} exceeds "
            f"{trunc.tail_tol:.0e} (n_max={poly.n_max})")
    return phi, tail_max


def phi_exact(z: float, v: float, x0: float, K: int, p: DerivedParams,
              trunc: SeriesTruncation | None = None) -> float:
    """Pr(K selected branches each exceed v and sum to at most z | x0).

    Zero whenever z < K*v: K values above v cannot sum below z.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if v < 0 or x0 < 0:
        raise ValueError("v and x0 must be >= 0")
    trunc = trunc or SeriesTruncation()
    if z <= K * v:
        return 0.0
    if p.mu >= 1.0 or not math.isfinite(p.omega):
        raise DegenerateCorrelation("mu = 1 not supported by the analytic path")
    poly = _kfold_poly(p.omega, p.mu, K, trunc.n_max, trunc.tail_tol,
                       trunc.term_cap)
    phi, _ = _phi_grid(poly, z, np.array([v]), np.array([x0]), p, trunc)
    return float(phi[0, 0])


# ---------------------------------------------------------------------------
# conditional and unconditional outage by Gauss-Chebyshev quadrature
# ---------------------------------------------------------------------------

def _check_probability(value: float, what: str, nodes: int):
    """Reject values outside [0, 1] beyond the quadrature's own tolerance.

    The Chebyshev rule is second order in the node count with an observed
    error constant under 5, so a computed probability may legitimately sit
    up to ~5/nodes^2 above 1 when the true value is at the top of the
    scale; anything further out signals a truncation or assembly defect
    rather than discretization.
    """
    slack = max(1e-9, 50.0 / (nodes * nodes))
    if not -1e-9 <= value <= 1.0 + slack:
        raise NumericalInstability(f"{what} {value} outside [0, 1]")


def _psi_grid(v_nodes: np.ndarray, x0_nodes: np.ndarray, T: int,
              p: DerivedParams) -> np.ndarray:
    """Psi over the same (x0, v) grid as :func:`_phi_grid`."""
    if T == 0:
        return np.ones((x0_nodes.size, v_nodes.size))
    a = np.sqrt(2.0 * p.omega * p.mu * x0_nodes)
    b = np.sqrt(2.0 * p.omega * v_nodes)
    return specfun.marcum_q1c_grid(a, b) ** T


def _port_pdf_grid(v_nodes: np.ndarray, x0_nodes: np.ndarray,
                   p: DerivedParams) -> np.ndarray:
    """Conditional single-port density f(v | x0) on the grid (x0 rows)."""
    w = p.omega
    arg = 2.0 * w * np.sqrt(p.mu * np.outer(x0_nodes, v_nodes))
    log_f = math.log(w) - w * (v_nodes[None, :] + p.mu * x0_nodes[:, None]) \
        + arg + np.log(i0e(arg))
    return np.exp(log_f)


def _inner_sum(z: float, x0_nodes: np.ndarray, cfg: SystemConfig,
               p: DerivedParams, trunc: SeriesTruncation,
               u_l: int) -> tuple[np.ndarray, float]:
    """Inner Gauss-Chebyshev sum over the selection threshold, per x0 node.

    Returns (row vector over x0 nodes, max truncation tail).  The row
    already carries the z pi / (2 K u_l) interval constant and the
    selection multiplicity, i.e. it equals the conditional outage
    Lambda(z | x0) at each node.
    """
    K, M = cfg.K, cfg.M
    T = p.T
    t_l, w_l = specfun.chebyshev_grid(u_l)
    v_nodes = z * (t_l + 1.0) / (2.0 * K)
    poly = _kfold_poly(p.omega, p.mu, K, trunc.n_max, trunc.tail_tol,
                       trunc.term_cap)
    phi, tail = _phi_grid(poly, z, v_nodes, x0_nodes, p, trunc)
    psi = _psi_grid(v_nodes, x0_nodes, T, p)
    pdf = _port_pdf_grid(v_nodes, x0_nodes, p)
    contrib = phi * psi * pdf * w_l[None, :]
    mult = selection_multiplicity(M, K)
    const = mult * z * math.pi / (2.0 * K * u_l)
    rows = np.array([math.fsum(contrib[i]) for i in range(x0_nodes.size)])
    return const * rows, tail


def lambda_conditional(z: float, x0: float, cfg: SystemConfig,
                       p: DerivedParams,
                       trunc: SeriesTruncation | None = None,
                       quad: QuadratureConfig | None = None) -> float:
    """Outage probability conditioned on the reference SNR: Pr(best-K MRC
    sum <= z | reference = x0).

    The threshold variable is integrated over [0, z/K] only, since Phi
    vanishes beyond z/K.
    """
    trunc = trunc or SeriesTruncation()
    quad = quad or QuadratureConfig()
    if cfg.K >= cfg.M:
        raise UnsupportedConfiguration(
            "conditional outage needs K <= M-1 (an idle port must exist)")
    if z <= 0:
        return 0.0
    rows, _ = _inner_sum(z, np.array([float(x0)]), cfg, p, trunc, quad.u_l)
    value = float(rows[0])
    _check_probability(value, "conditional outage", quad.u_l)
    return min(max(value, 0.0), 1.0)


def outage_gc(cfg: SystemConfig, trunc: SeriesTruncation | None = None,
              quad: QuadratureConfig | None = None) -> OutageEstimate:
    """Outage probability by the double Gauss-Chebyshev sum.

    Outer nodes map [0, H] for the reference SNR, inner nodes map
    [0, z/K] for the selection threshold:

        P ~ C(M,K)(M-K) * pi^2 H z / (4 K u_p u_l) *
            sum_p sum_l Phi Psi sqrt(1-t_p^2) sqrt(1-t_l^2)
                        f(y_l | y_p) f0(y_p)

    Diagnostics record H, the node counts and the worst truncation tail.
    The final accumulation uses exact summation (math.fsum), so the result
    is independent of node ordering.
    """
    trunc = trunc or SeriesTruncation()
    quad = quad or QuadratureConfig()
    if cfg.K >= cfg.M:
        raise UnsupportedConfiguration("outage_gc needs K <= M-1")
    p = derive_params(cfg)
    if p.mu >= 1.0:
        raise UnsupportedConfiguration("outage_gc needs mu < 1")
    z = p.z
    H = quad.resolve_h(cfg.phi)
    t_p, w_p = specfun.chebyshev_grid(quad.u_p)
    x0_nodes = H * (t_p + 1.0) / 2.0

    rows, tail = _inner_sum(z, x0_nodes, cfg, p, trunc, quad.u_l)
    f0 = np.exp(-x0_nodes / cfg.phi) / cfg.phi
    outer_const = H * math.pi / (2.0 * quad.u_p)
    value = outer_const * math.fsum(rows * w_p * f0)
    _check_probability(value, "Gauss-Chebyshev outage", quad.u_p)
    value = min(max(value, 0.0), 1.0)
    return OutageEstimate(
        value=value, ci_low=value, ci_high=value, method="gc",
        samples_or_nodes=quad.u_p * quad.u_l,
        diagnostics={"H": H, "u_p": quad.u_p, "u_l": quad.u_l,
                     "tail_max": tail, "n_max": trunc.n_max})
