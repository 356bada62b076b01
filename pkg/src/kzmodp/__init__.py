"""p-hypergeometric solutions of the sl2 KZ equations modulo a prime, with exact checks."""

from .arith import PrimePair, binom_mod_p, classify_pair
from .cartier import cartier_decompose, enumerate_partitions, schur, verify_reconstruction
from .errors import CertificationError, InvalidInput, SizeGuardError
from .kzcore import (
    ModelParams,
    OrbitVectorPoly,
    VectorPoly,
    casimir_minus_half,
    check_kz,
    check_singular,
    construct_solution,
    master_polynomial,
    phi_times_weight,
    shifted_master_congruence,
)
from .leading import LeadingData, certify_rank, check_eigen, leading_term, predict_index, predict_leading
from .mpoly import MPoly

__version__ = "0.1.0"

__all__ = [
    "CertificationError",
    "InvalidInput",
    "LeadingData",
    "MPoly",
    "ModelParams",
    "OrbitVectorPoly",
    "PrimePair",
    "SizeGuardError",
    "VectorPoly",
    "binom_mod_p",
    "cartier_decompose",
    "casimir_minus_half",
    "certify_rank",
    "check_eigen",
    "check_kz",
    "check_singular",
    "classify_pair",
    "construct_solution",
    "enumerate_partitions",
    "leading_term",
    "master_polynomial",
    "phi_times_weight",
    "predict_index",
    "predict_leading",
    "schur",
    "shifted_master_congruence",
    "verify_reconstruction",
]
