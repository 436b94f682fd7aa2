"""Exact and numerical classification of structured Hilbert-space operators."""

from .classify import (ClassVerdict, Verdict, Witness, classify_block_general,
                       classify_block_positive, classify_buckholtz, classify_idempotent,
                       classify_positive, decompose)
from .errors import (BorderlineError, FiniteSpaceError, NonCompactCoupling, NotInClass,
                     NotPositive, OpClassError, SpaceMismatch, UnrepresentableProduct)
from .operators import (INFINITE_SPACE, BlockOperator, Coupling, IdempotentOperator,
                        SpaceDim, StructuredOperator, add, buckholtz_square,
                        essential_spectrum, essential_spectrum_block, gram_block,
                        gram_general, gram_idempotent, has_closed_range, is_positive,
                        is_positive_block, min_modulus, multiply, operator_norm, scale)
from .spectra import (INFINITE, SpectralSequence, TailStrand, TailTerm, seq_infimum,
                      seq_supremum)

__all__ = [
    "ClassVerdict", "Verdict", "Witness", "classify_block_general", "classify_block_positive",
    "classify_buckholtz", "classify_idempotent", "classify_positive", "decompose",
    "BorderlineError", "FiniteSpaceError", "NonCompactCoupling", "NotInClass", "NotPositive",
    "OpClassError", "SpaceMismatch", "UnrepresentableProduct", "INFINITE_SPACE", "BlockOperator",
    "Coupling", "IdempotentOperator", "SpaceDim", "StructuredOperator", "add", "buckholtz_square",
    "essential_spectrum", "essential_spectrum_block", "gram_block", "gram_general",
    "gram_idempotent", "has_closed_range", "is_positive", "is_positive_block", "min_modulus",
    "multiply", "operator_norm", "scale", "INFINITE", "SpectralSequence", "TailStrand", "TailTerm",
    "seq_infimum", "seq_supremum",
]
