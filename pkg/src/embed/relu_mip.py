"""
Big-M MILP embedding of a dense ReLU network. Each hidden neuron gets an
activation y >= 0, a slack s >= 0 and a switch z in {0, 1}:

    y - s - w^T y_prev = b        (xi part of the first layer folded into b)
    y - U z          <= 0
    s - L z          <= -L        (s <= -L (1 - z))

with L < 0 < U from interval bound propagation.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from src.errors import DimensionMismatch, UnboundedInput
from src.lp import EQ, LE, ProgramBuilder
from src.nn import ReluNetParams
from src.spmodel import FirstStage
from .bounds import propagate_bounds
from .model import EmbeddedModel, add_first_stage, finish_program

logger = logging.getLogger(__name__)


def network_input_bounds(first_stage: FirstStage, xi: np.ndarray,
                         x_bounds: Optional[Sequence[Tuple[float, float]]] = None) -> np.ndarray:
    """Bounds on [x, xi]: x from the given box or the first-stage bounds, xi pinned to its value"""
    if x_bounds is None:
        x_box = np.column_stack([first_stage.lower, first_stage.upper])
    else:
        x_box = np.asarray(x_bounds, dtype=float).reshape(-1, 2)
    if x_box.shape[0] != first_stage.n:
        raise DimensionMismatch(f"got {x_box.shape[0]} input bounds for {first_stage.n} first-stage variables")
    if not np.all(np.isfinite(x_box)):
        raise UnboundedInput("every first-stage variable needs finite bounds for the big-M embedding")
    return np.vstack([x_box, np.column_stack([xi, xi])])


def embed_relu_mip(p: ReluNetParams, xi, first_stage: FirstStage,
                   input_bounds: Optional[Sequence[Tuple[float, float]]] = None, target_mean: float = 0.0,
                   target_std: float = 1.0, negated: bool = False) -> EmbeddedModel:
    xi = np.atleast_1d(np.asarray(xi, dtype=float)) if p.xi_dim else np.zeros(0)
    if xi.size != p.xi_dim:
        raise DimensionMismatch(f"network expects an encoding of length {p.xi_dim}, got {xi.size}")
    if first_stage.n != p.x_dim:
        raise DimensionMismatch(f"network expects {p.x_dim} first-stage variables, problem has {first_stage.n}")
    layer_bounds = propagate_bounds(p, network_input_bounds(first_stage, xi, input_bounds))

    builder = ProgramBuilder()
    x_cols = add_first_stage(builder, first_stage)
    n_x = p.x_dim
    prev_cols = x_cols
    hidden = 0
    out_col = -1
    scale = -target_std if negated else target_std
    for layer, (w, b) in enumerate(zip(p.weights, p.biases)):
        if layer == 0:
            w_var, const = w[:, :n_x], w[:, n_x:] @ xi + b
        else:
            w_var, const = w, b
        if layer == p.n_layers - 1:
            out_col = builder.add_variable(-np.inf, np.inf, scale, "out")
            coeffs = {out_col: 1.0}
            for j in np.flatnonzero(w_var[0]):
                coeffs[int(prev_cols[j])] = -float(w_var[0, j])
            builder.add_constraint(coeffs, EQ, float(const[0]))
            break

        bounds = layer_bounds[layer]
        big_l, big_u = bounds.big_m_lower, bounds.big_m_upper
        width = w.shape[0]
        y = builder.add_variables(width, lower=0.0, upper=np.inf, prefix=f"h{layer + 1}_")
        s = builder.add_variables(width, lower=0.0, upper=np.inf, prefix=f"s{layer + 1}_")
        z = builder.add_variables(width, lower=0.0, upper=1.0, prefix=f"a{layer + 1}_", integer=True)
        for i in range(width):
            coeffs = {int(y[i]): 1.0, int(s[i]): -1.0}
            for j in np.flatnonzero(w_var[i]):
                coeffs[int(prev_cols[j])] = -float(w_var[i, j])
            builder.add_constraint(coeffs, EQ, float(const[i]))
            builder.add_constraint({int(y[i]): 1.0, int(z[i]): -float(big_u[i])}, LE, 0.0)
            builder.add_constraint({int(s[i]): 1.0, int(z[i]): -float(big_l[i])}, LE, -float(big_l[i]))
        hidden += width
        prev_cols = y
    builder.objective_offset = -target_mean if negated else target_mean

    program, summary = finish_program(builder, "NN", first_stage.n, hidden)
    logger.info(f"ReLU MIP embedding: {summary.n_continuous} continuous, {summary.n_integer} integer "
                f"({summary.aux_binary} neuron switches), {summary.n_rows} rows")
    return EmbeddedModel(program=program, x_indices=x_cols, output_index=out_col, size_summary=summary,
                         hidden_dims=tuple(p.hidden_dims), target_mean=target_mean, target_std=target_std,
                         negated=negated)
