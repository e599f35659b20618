"""Seeded Monte-Carlo estimation of the outage probability.

This module is the stochastic oracle for the analytical paths: it samples
the physical channel directly (reference channel plus independent port
components), performs best-K selection and maximum ratio combining, and
counts outages.

Reproducibility contract: estimates depend only on (seed, samples,
chunk_size), never on scheduling.  Each chunk derives its own RNG stream
from (seed, chunk index) and contributes an integer success count; integer
accumulation is exact and order-independent, so any degree of parallelism
yields bit-identical results.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np

from .channel import DerivedParams, SystemConfig, derive_params
from .errors import OracleStarvation
from .results import OutageEstimate

#: 95% normal quantile used for all Monte-Carlo confidence intervals.
_Z95 = 1.959963984540054


@dataclass(frozen=True)
class McConfig:
    """Monte-Carlo budget: total samples, RNG seed, and the chunk size that
    fixes the deterministic sub-stream boundaries."""

    samples: int
    seed: int = 12345
    chunk_size: int = 250_000

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")

    def chunks(self) -> list[tuple[int, int]]:
        """(chunk index, chunk length) pairs covering the sample budget."""
        out = []
        remaining = self.samples
        index = 0
        while remaining > 0:
            n = min(self.chunk_size, remaining)
            out.append((index, n))
            remaining -= n
            index += 1
        return out


def chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    """Deterministic per-chunk generator derived from (seed, chunk index)."""
    return np.random.default_rng(np.random.SeedSequence([seed, chunk_index]))


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Circularly symmetric complex Gaussians with unit variance."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) \
        * math.sqrt(0.5)


def _port_snr_matrix(rng, n: int, cfg: SystemConfig, p: DerivedParams,
                     g0: complex | np.ndarray | None = None) -> np.ndarray:
    """n x M matrix of port SNRs.

    Each port mixes the shared reference draw with an independent component
    using sqrt(mu) / sqrt(1-mu) weights, which reproduces both the
    unit-mean marginal (E[snr] = phi) and the conditional noncentral
    chi-square law used by the analytic path.  Pass g0 to pin the reference
    draw (conditional sampling).
    """
    if g0 is None:
        g0 = _complex_normal(rng, (n, 1))
    e = _complex_normal(rng, (n, cfg.M))
    h = math.sqrt(p.mu) * g0 + math.sqrt(1.0 - p.mu) * e
    return cfg.phi * (h.real ** 2 + h.imag ** 2)


def sample_port_snrs(rng: np.random.Generator, cfg: SystemConfig,
                     p: DerivedParams,
                     g0: complex | None = None) -> np.ndarray:
    """One draw of the M port SNRs (optionally with a pinned reference g0)."""
    return _port_snr_matrix(rng, 1, cfg, p, g0=g0)[0]


def mrc_snr(snrs: np.ndarray, K: int) -> float:
    """Combined SNR: sum of the K largest entries (partial selection)."""
    snrs = np.asarray(snrs, dtype=float)
    M = snrs.shape[-1]
    if not 1 <= K <= M:
        raise ValueError(f"K must satisfy 1 <= K <= M, got K={K}, M={M}")
    if K == M:
        return float(snrs.sum())
    return float(np.partition(snrs, M - K)[M - K:].sum())


def _binomial_estimate(successes: int, n: int, method: str,
                       diagnostics: dict[str, Any] | None = None) -> OutageEstimate:
    """Normal-approximation interval, with the rule of three at the edges."""
    p_hat = successes / n
    if successes == 0:
        lo, hi = 0.0, min(1.0, 3.0 / n)
    elif successes == n:
        lo, hi = max(0.0, 1.0 - 3.0 / n), 1.0
    else:
        half = _Z95 * math.sqrt(p_hat * (1.0 - p_hat) / n)
        lo, hi = max(0.0, p_hat - half), min(1.0, p_hat + half)
    return OutageEstimate(value=p_hat, ci_low=lo, ci_high=hi, method=method,
                          samples_or_nodes=n, diagnostics=diagnostics or {})


def _run_chunks(mc: McConfig, worker, jobs: int = 1) -> list:
    """Evaluate worker(chunk_index, chunk_len) over all chunks.

    Results are collected by chunk index, so the merge is independent of
    completion order and of the worker count.
    """
    chunks = mc.chunks()
    if jobs <= 1 or len(chunks) == 1:
        return [worker(i, n) for i, n in chunks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(worker, i, n) for i, n in chunks]
        return [f.result() for f in futures]


def estimate_outage(cfg: SystemConfig, mc: McConfig,
                    jobs: int = 1) -> OutageEstimate:
    """Monte-Carlo outage probability of best-K MRC over M correlated ports.

    Outage means the combined SNR is at most z = 2**R - 1.  Deterministic
    for fixed (seed, samples, chunk_size) regardless of `jobs`.
    """
    p = derive_params(cfg)
    z = p.z

    def worker(index: int, n: int) -> int:
        rng = chunk_rng(mc.seed, index)
        snr = _port_snr_matrix(rng, n, cfg, p)
        if cfg.K == cfg.M:
            combined = snr.sum(axis=1)
        else:
            combined = np.partition(snr, cfg.M - cfg.K, axis=1)[:, cfg.M - cfg.K:].sum(axis=1)
        return int(np.count_nonzero(combined <= z))

    successes = sum(_run_chunks(mc, worker, jobs=jobs))
    return _binomial_estimate(successes, mc.samples, "mc",
                              {"chunks": len(mc.chunks()), "seed": mc.seed})


def _conditional_branch_snrs(rng, n: int, count: int, x0: float,
                             p: DerivedParams) -> np.ndarray:
    """n x count port SNRs conditioned on the reference SNR being x0.

    Conditioned draws are |sqrt(mu x0) + sigma (n1 + j n2)|^2 with
    sigma^2 = 1/(2 omega) per real dimension; the reference phase is
    irrelevant by circular symmetry.
    """
    s = math.sqrt(p.mu * x0)
    sigma = math.sqrt(0.5 / p.omega)
    re = s + sigma * rng.standard_normal((n, count))
    im = sigma * rng.standard_normal((n, count))
    return re ** 2 + im ** 2


def estimate_psi_mc(v: float, x0: float, T: int, p: DerivedParams,
                    mc: McConfig) -> OutageEstimate:
    """Conditional MC estimate of Pr(all T idle-port SNRs <= v | x0).

    Test oracle for the closed-form idle-port probability; T = 0 is the
    empty conjunction and returns exactly 1.
    """
    if T < 0:
        raise ValueError("T must be >= 0")
    if T == 0:
        return OutageEstimate(1.0, 1.0, 1.0, "mc", mc.samples,
                              {"oracle": "psi"})

    def worker(index: int, n: int) -> int:
        rng = chunk_rng(mc.seed, index)
        draws = _conditional_branch_snrs(rng, n, T, x0, p)
        return int(np.count_nonzero(np.all(draws <= v, axis=1)))

    successes = sum(_run_chunks(mc, worker))
    return _binomial_estimate(successes, mc.samples, "mc", {"oracle": "psi"})


def estimate_phi_mc(z: float, v: float, x0: float, K: int, p: DerivedParams,
                    mc: McConfig,
                    min_acceptance: float = 1e-6) -> OutageEstimate:
    """Conditional MC estimate of Pr(sum of K branch SNRs <= z and every
    branch > v | x0).

    The joint event is counted directly; the fraction of proposals with all
    K branches above v is the rejection-acceptance rate, and the oracle
    refuses to report (OracleStarvation) when that rate falls below
    `min_acceptance`, since the conditional part is then unresolvable.
    """
    if K < 1:
        raise ValueError("K must be >= 1")

    def worker(index: int, n: int) -> tuple[int, int]:
        rng = chunk_rng(mc.seed, index)
        draws = _conditional_branch_snrs(rng, n, K, x0, p)
        above = np.all(draws > v, axis=1)
        joint = above & (draws.sum(axis=1) <= z)
        return int(np.count_nonzero(above)), int(np.count_nonzero(joint))

    pairs = _run_chunks(mc, worker)
    accepted = sum(a for a, _ in pairs)
    successes = sum(j for _, j in pairs)
    acceptance = accepted / mc.samples
    if acceptance < min_acceptance:
        raise OracleStarvation(
            f"acceptance rate {acceptance:.2e} below {min_acceptance:.0e} "
            f"for v={v}, K={K}")
    return _binomial_estimate(successes, mc.samples, "mc",
                              {"oracle": "phi", "acceptance": acceptance})
