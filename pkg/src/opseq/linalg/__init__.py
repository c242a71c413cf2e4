"""Exact linear algebra over F_p, Q and Z."""
from .dense import (
    NoSolution,
    Solver,
    contains,
    det,
    hstack,
    image_basis,
    kernel,
    rank,
    rref,
    same_span,
    snf,
    snf_full,
    solve,
)
from .rings import Ring, is_prime
from .subquotient import (
    NotASubmodule,
    ProjectUndefined,
    Subquotient,
    coord_kernel,
    coord_preimage,
    coord_solve,
    induced_matrix,
    mod_orders,
    relation_matrix,
    transfer,
    zero_module,
)

__all__ = [
    "NoSolution", "NotASubmodule", "ProjectUndefined", "Ring", "Solver", "Subquotient",
    "contains", "coord_kernel", "coord_preimage", "coord_solve", "det", "hstack",
    "image_basis", "induced_matrix", "is_prime", "kernel", "mod_orders", "relation_matrix", "rank", "rref", "same_span",
    "snf", "snf_full", "solve", "transfer", "zero_module",
]
