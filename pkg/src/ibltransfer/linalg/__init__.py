from .maps import (
                   GradedMap,
                   GradedSpace,
                   add,
                   compose,
                   derivation_power,
                   factor_map,
                   permute_inputs,
                   permute_outputs,
                   scale,
                   tensor,
                   tensor_power,
)
from .perms import Permutation, inverse_shuffles, koszul_sign, perm_sign, shuffles
from .rational import ONE, ZERO, Q, q_str, to_q
from .solve import Eliminator, eliminate, kernel_basis, rank, solve_preimage

__all__ = [
    "GradedMap", "GradedSpace", "add", "compose", "derivation_power", "factor_map",
    "permute_inputs", "permute_outputs", "scale", "tensor", "tensor_power",
    "Permutation", "inverse_shuffles", "koszul_sign", "perm_sign", "shuffles",
    "ONE", "Q", "ZERO", "q_str", "to_q",
    "Eliminator", "eliminate", "kernel_basis", "rank", "solve_preimage",
]
