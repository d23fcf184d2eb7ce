"""Explicit non-adaptive group testing from Gilbert-Varshamov linear codes."""
from .field import FieldElement, PrimeField, smallest_prime_in
from .gvcode import (
    BudgetExceeded,
    Construction,
    GeneratorMatrix,
    derandomized_construct,
    encode,
    goal,
    random_code,
    reed_solomon,
    verify_distance,
)
from .params import CodeParams, SchemeParams, binom_tail_lt, derive_params, entropy_q, minimal_length
from .scheme import InconsistentOutcomes, build_gt_scheme, build_scheme, decode, outcomes, simulate
from .ssf import Scheme, reduce_code, verify_ssf, verify_ssf_sampled

__version__ = "0.1.0"
