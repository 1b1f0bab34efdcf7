"""Lorentz-space norms, Littlewood-Paley norms and embedding checks on periodic grids."""

from .counterexamples import FamilySpec, RatioTable, build_family, measure_ratio, select_family
from .littlewood_paley import besov_norm, build_beta_family, build_psi_kernels, lp_decompose, tl_norm
from .measure import (
    INF,
    GridFunction,
    LorentzExponents,
    lorentz_norm,
    lorentz_norm_via_distribution,
    rearrange,
)
from .oracle import EmbeddingQuery, SmoothnessParams, Verdict, decide
from .sequences import FunctionSequence, SeqEmbeddingQuery, decide_seq_embedding
from .triangle import ConstantReport, bks_constant, bound_modulo_A, empirical_constant, stw_bound

__all__ = [
    "INF",
    "ConstantReport",
    "EmbeddingQuery",
    "FamilySpec",
    "FunctionSequence",
    "GridFunction",
    "LorentzExponents",
    "RatioTable",
    "SeqEmbeddingQuery",
    "SmoothnessParams",
    "Verdict",
    "besov_norm",
    "bks_constant",
    "bound_modulo_A",
    "build_beta_family",
    "build_family",
    "build_psi_kernels",
    "decide",
    "decide_seq_embedding",
    "empirical_constant",
    "lorentz_norm",
    "lorentz_norm_via_distribution",
    "lp_decompose",
    "measure_ratio",
    "rearrange",
    "select_family",
    "stw_bound",
    "tl_norm",
]
__version__ = "0.1.0"
