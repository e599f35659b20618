"""fasmrc: outage-probability laboratory for fluid antenna systems with
best-K port selection and maximum ratio combining.

Four mutually cross-checking estimation paths:

* ``montecarlo.estimate_outage``  seeded, chunk-deterministic simulation
* ``analytic.outage_gc``          exact series + Gauss-Chebyshev quadrature
* ``bounds.outage_lower_bound``   closed-form lower bound
* ``bounds.outage_asymptotic``    high-SNR asymptote (diversity order M)
"""

from .analytic import (QuadratureConfig, SeriesTruncation,
                       SparseLtPolynomial, branch_lt, lambda_conditional,
                       laplace_numeric, lt_closed_form_g, lt_closed_form_p,
                       lt_power_k, outage_gc, phi_exact, psi_exact,
                       selection_multiplicity)
from .bounds import (BoundBreakdown, diversity_order, lower_bound_breakdown,
                     outage_asymptotic, outage_lower_bound, psi_factor)
from .channel import (DerivedParams, SystemConfig, correlation_mu,
                      derive_params, port_cdf_conditional,
                      port_pdf_conditional, ref_snr_pdf)
from .cli import ExperimentSpec, run_experiment, validate_spec
from .errors import (DegenerateCorrelation, FasmrcError, NumericalInstability,
                     OracleStarvation, QuadratureNonconvergence,
                     TermExplosion, TruncationFailure,
                     UnsupportedConfiguration)
from .montecarlo import (McConfig, estimate_outage, estimate_phi_mc,
                         estimate_psi_mc, mrc_snr, sample_port_snrs)
from .results import OutageEstimate
from .specfun import (LogValue, bessel_i0, bessel_i0e, bessel_j0, bessel_j1,
                      binomial, chebyshev_grid, hyp1f2_half,
                      log_factorial, lower_incomplete_gamma_int, marcum_q1,
                      marcum_q1c)

__version__ = "0.1.0"

__all__ = [
    "BoundBreakdown", "DegenerateCorrelation", "DerivedParams",
    "ExperimentSpec", "FasmrcError", "LogValue", "McConfig",
    "NumericalInstability", "OracleStarvation", "OutageEstimate",
    "QuadratureConfig", "QuadratureNonconvergence", "SeriesTruncation",
    "SparseLtPolynomial", "SystemConfig", "TermExplosion",
    "TruncationFailure", "UnsupportedConfiguration", "bessel_i0",
    "bessel_i0e", "bessel_j0", "bessel_j1", "binomial", "branch_lt",
    "chebyshev_grid", "correlation_mu", "derive_params", "diversity_order",
    "estimate_outage", "estimate_phi_mc", "estimate_psi_mc", "hyp1f2_half",
    "lambda_conditional", "laplace_numeric", "log_factorial",
    "lower_bound_breakdown", "lower_incomplete_gamma_int",
    "lt_closed_form_g", "lt_closed_form_p", "lt_power_k", "marcum_q1",
    "marcum_q1c", "mrc_snr", "outage_asymptotic", "outage_gc",
    "outage_lower_bound", "phi_exact", "port_cdf_conditional",
    "port_pdf_conditional", "psi_exact", "psi_factor", "ref_snr_pdf",
    "run_experiment", "sample_port_snrs", "selection_multiplicity",
    "validate_spec",
]
