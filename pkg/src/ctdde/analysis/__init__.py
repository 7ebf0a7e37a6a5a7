"""Verdicts built on rigorous envelopes: comparison tests, certificates, decay bounds."""

from .certificate import (BoundsReport, Certificate, CertificateError, CertificateResult,
                          certificate_verdict, construct_bounded_solution, verify_certificate)
from .discrete import (DiscreteTestInput, constant_delays, critical_factor, discrete_oscillation_test,
                       lemma_constant_delay_tests, thm2_verdict, threshold)
from .groenwall import (GridSet, GroenwallCheck, GroenwallProduct, barrier_verdict, check_groenwall,
                        factor_barrier, groenwall_bound, groenwall_product, set_M, set_N, set_size)
from .nonincreasing import ScanResult, s_scan, s_value
from .verdict import Tag, Verdict

__all__ = [
    "BoundsReport", "Certificate", "CertificateError", "CertificateResult", "certificate_verdict",
    "construct_bounded_solution", "verify_certificate", "DiscreteTestInput", "constant_delays",
    "critical_factor", "discrete_oscillation_test", "lemma_constant_delay_tests", "thm2_verdict",
    "threshold", "GridSet", "GroenwallCheck", "GroenwallProduct", "barrier_verdict",
    "check_groenwall", "factor_barrier", "groenwall_bound", "groenwall_product", "set_M", "set_N",
    "set_size", "ScanResult", "s_scan", "s_value", "Tag", "Verdict",
]
