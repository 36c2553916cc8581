"""Colored and blobbed recursion for the quartic melonic tensor model."""
from .colored import (ColoredBase, ColoredForm, PhiProvider, colored_base, colored_vars,
                      leading_resolvent_series, leaf_var, normalized_omega, projector_H,
                      projector_P, unit)
from .graphs import BlobGraph, all_splits, enumerate_blob_graphs, format_graphs
from .tensor import (alpha_squared_series, alpha_taylor, second_moment_alpha_coefficients,
                     second_moment_from_tensor, tensor_wick_oracle)
from .weights import (ColoredTower, P_recursion_check, assemble_HP, evaluate_graph_weight,
                      reconstruct_omega)

__all__ = [
    "ColoredBase", "ColoredForm", "PhiProvider", "colored_base", "colored_vars",
    "leading_resolvent_series", "leaf_var", "normalized_omega", "projector_H", "projector_P",
    "unit", "BlobGraph", "all_splits", "enumerate_blob_graphs", "format_graphs",
    "alpha_squared_series", "alpha_taylor", "second_moment_alpha_coefficients",
    "second_moment_from_tensor", "tensor_wick_oracle", "ColoredTower", "P_recursion_check",
    "assemble_HP", "evaluate_graph_weight", "reconstruct_omega",
]
