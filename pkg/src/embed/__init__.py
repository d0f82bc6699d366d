"""
Optimization reformulations of trained surrogates: the exact ICNN LP, the ReLU
big-M MILP, interval bounds and formulation-size accounting.
"""

from .model import EmbeddedModel, SizeSummary
from .bounds import LayerBounds, propagate_bounds
from .icnn_lp import embed_icnn_lp
from .relu_mip import embed_relu_mip, network_input_bounds
from .network_file import load_network_file, network_from_dict
from .sizes import architecture_parity, count_variables, save_size_summary, size_summary_table
from .surrogate import embed_model, export_embedded, scenario_encoding

__all__ = [
    "EmbeddedModel",
    "SizeSummary",
    "LayerBounds",
    "propagate_bounds",
    "embed_icnn_lp",
    "embed_relu_mip",
    "network_input_bounds",
    "load_network_file",
    "network_from_dict",
    "architecture_parity",
    "count_variables",
    "save_size_summary",
    "size_summary_table",
    "embed_model",
    "export_embedded",
    "scenario_encoding",
]
