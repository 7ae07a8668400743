"""Workbench for finite pseudocomplemented semilattices."""

from .core import (
    CapError,
    ElementSet,
    FinPSL,
    InvalidAlgebraError,
    ProductCoding,
    boolean_algebra,
    extract,
    f_hat,
    hat,
    load_algebra,
    product,
    save_algebra,
    sg,
    sk_join,
    theta_quotient,
    validate,
)
from .logic import eval_formula, eval_sentence, parse, print_formula
from .morphisms import (
    Morphism,
    canonical_form,
    find_embedding_over,
    find_iso_over,
    is_homomorphism,
)

__all__ = [
    "CapError",
    "ElementSet",
    "FinPSL",
    "InvalidAlgebraError",
    "Morphism",
    "ProductCoding",
    "boolean_algebra",
    "canonical_form",
    "eval_formula",
    "eval_sentence",
    "extract",
    "f_hat",
    "find_embedding_over",
    "find_iso_over",
    "hat",
    "is_homomorphism",
    "load_algebra",
    "parse",
    "print_formula",
    "product",
    "save_algebra",
    "sg",
    "sk_join",
    "theta_quotient",
    "validate",
]
