"""Exponential tail bounds for sampling without replacement, checked
against exact hypergeometric computation."""
from .core_types import (
    BinParams,
    BoundValue,
    BoundsError,
    Deviation,
    DomainError,
    ExactProb,
    HGParams,
    NumericError,
    Population,
    SupportError,
    UsageError,
    standardize,
)
from .kernels import BACKEND
from .majorization import (
    chernoff_submajor,
    kemperman_majorize,
    prec,
    prec_w,
    sub_majorize,
    verify_convex_order,
)
from .oracle import (
    bernoulli_decomposition,
    binom_pmf,
    binom_tail,
    ehm_tv_bound,
    hg_pmf,
    hg_tail,
    tv_distance,
)
from .registry import (
    BoundId,
    MatrixInput,
    PopInput,
    bm_c_n,
    conjectured_serfling,
    evaluate,
    evaluate_grid,
    sigma_A2,
    sup_dev_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BinParams", "BoundId", "BoundValue", "BoundsError", "Deviation",
    "DomainError", "ExactProb", "HGParams", "MatrixInput", "NumericError", "PopInput",
    "Population", "SupportError", "UsageError", "bernoulli_decomposition", "binom_pmf",
    "binom_tail", "bm_c_n", "chernoff_submajor", "conjectured_serfling", "ehm_tv_bound",
    "evaluate", "evaluate_grid", "hg_pmf", "hg_tail", "kemperman_majorize", "prec",
    "prec_w", "sigma_A2", "standardize", "sub_majorize", "sup_dev_matrix", "tv_distance",
    "verify_convex_order",
]
