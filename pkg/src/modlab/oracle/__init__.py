"""Independent exact engines used to validate the estimators."""

from .pmfs import (
    StateSpaceError,
    TailMassError,
    curie_weiss_pmf,
    euler_partition_pmf,
    macmahon_pmf,
    markov_visit_pmf,
    partition_numbers,
    partition_pmf_divisor,
    plane_partition_numbers,
    poisson_binomial,
    prime_sieve,
    return_time_distribution,
    stationary_distribution,
    triangle_count_pmf,
)
from .quadrature import QuadratureError, QuadratureResult, certified_quadrature
from .special import SeriesError, bessel_i, digamma, hyp2f1_c1, log_gamma, trigamma

__all__ = [
    "QuadratureError", "QuadratureResult", "SeriesError", "StateSpaceError",
    "TailMassError", "bessel_i", "certified_quadrature", "curie_weiss_pmf",
    "digamma", "euler_partition_pmf", "hyp2f1_c1", "log_gamma", "macmahon_pmf",
    "markov_visit_pmf", "partition_numbers", "partition_pmf_divisor",
    "plane_partition_numbers", "poisson_binomial", "prime_sieve",
    "return_time_distribution", "stationary_distribution", "triangle_count_pmf",
    "trigamma",
]
