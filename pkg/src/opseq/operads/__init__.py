"""Dg operads, their algebras, homology actions and PROPs."""
from .algebra import ArityOutOfRange, OperadAlgebra, check_algebra
from .builtins import assoc, builtin, comm, endomorphism, lie
from .homology import TorsionInOperad, homology_action, homology_carrier, homology_operad, project_tensor
from .operad import Operad, UnsupportedArity, check_operad
from .prop import Prop, PropAlgebra, block_swap, check_prop, check_prop_algebra, endomorphism_prop, tautological_algebra

__all__ = ["Operad", "UnsupportedArity", "assoc", "builtin", "check_operad", "comm", "endomorphism", "lie",
           "ArityOutOfRange", "OperadAlgebra", "check_algebra", "TorsionInOperad", "homology_action",
           "homology_carrier", "homology_operad", "project_tensor", "Prop", "PropAlgebra", "block_swap",
           "check_prop", "check_prop_algebra", "endomorphism_prop", "tautological_algebra"]
