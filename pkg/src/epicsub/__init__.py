"""Epic substructures and surjectivity of epimorphisms for finite algebras."""

from .algebra import Algebra, Apply, Identity, Signature, Var, parse_term, product
from .certificates import DeltaCertificate, defines_function, delta_formula, verify_witness
from .clone import find_majority_term, find_nu_term, find_pixley_term, free_algebra
from .epic import DecisionReport, RunConfig, decide_surjective_epis, find_proper_epic, is_epic
from .homs import homs
from .io import emit_algebra, load_algebra, parse_algebra
from .limits import Limits, ResourceLimitExceeded
from .quasivariety import in_quasivariety, q_rsi_class
from .structure import canonical_form, congruences, is_isomorphic, subuniverses

__all__ = [
    "Algebra", "Apply", "Identity", "Signature", "Var", "parse_term", "product",
    "DeltaCertificate", "defines_function", "delta_formula", "verify_witness",
    "find_majority_term", "find_nu_term", "find_pixley_term", "free_algebra",
    "DecisionReport", "RunConfig", "decide_surjective_epis", "find_proper_epic", "is_epic",
    "homs", "emit_algebra", "load_algebra", "parse_algebra", "Limits", "ResourceLimitExceeded",
    "in_quasivariety", "q_rsi_class", "canonical_form", "congruences", "is_isomorphic", "subuniverses",
]
