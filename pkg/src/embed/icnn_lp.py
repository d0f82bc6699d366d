"""
Exact LP embedding of an ICNN with fixed scenario encoding xi:

    z_{k+1} >= W_k z_k + S^x_k x + (S^xi_k xi + b_k),   z_{k+1} >= 0 for hidden layers
    out     >= W_{K-1} z_{K-1} + S^x_{K-1} x + (S^xi_{K-1} xi + b_{K-1})

Minimizing a positive multiple of ``out`` drives every row on the optimal path
tight, so the LP value equals the feedforward value.
"""

import logging

import numpy as np

from src.errors import DimensionMismatch, NonNegativityViolated
from src.lp import GE, ProgramBuilder
from src.nn import IcnnParams
from src.spmodel import FirstStage
from .model import EmbeddedModel, add_first_stage, finish_program

logger = logging.getLogger(__name__)

NEGATIVE_WEIGHT_TOL = 1e-12


def embed_icnn_lp(p: IcnnParams, xi, first_stage: FirstStage, target_mean: float = 0.0,
                  target_std: float = 1.0, negated: bool = False) -> EmbeddedModel:
    xi = np.atleast_1d(np.asarray(xi, dtype=float)) if p.xi_dim else np.zeros(0)
    if xi.size != p.xi_dim:
        raise DimensionMismatch(f"ICNN expects an encoding of length {p.xi_dim}, got {xi.size}")
    if first_stage.n != p.x_dim:
        raise DimensionMismatch(f"ICNN expects {p.x_dim} first-stage variables, problem has {first_stage.n}")
    for k, w in enumerate(p.weights, start=1):
        if w.size and w.min() < -NEGATIVE_WEIGHT_TOL:
            raise NonNegativityViolated(f"W_{k} has entry {w.min():.3g} < 0; the LP embedding would not be exact")
    if negated:
        raise ValueError("a network trained on negated targets is concave in x and has no LP embedding")
    if target_std <= 0:
        raise ValueError("target_std must be positive")

    builder = ProgramBuilder()
    x_cols = add_first_stage(builder, first_stage)
    n_x = p.x_dim
    prev_cols = None
    hidden = 0
    out_col = -1
    for k in range(p.n_layers):
        S = p.skips[k]
        const = S[:, n_x:] @ xi + p.biases[k]
        last = k == p.n_layers - 1
        width = S.shape[0]
        if last:
            out_col = builder.add_variable(-np.inf, np.inf, target_std, "out")
            cols = np.array([out_col])
        else:
            cols = builder.add_variables(width, lower=0.0, upper=np.inf, prefix=f"z{k + 1}_")
            hidden += width
        W = np.maximum(p.weights[k - 1], 0.0) if k > 0 else None
        for i in range(width):
            coeffs = {int(cols[i]): 1.0}
            for j in range(n_x):
                if S[i, j] != 0.0:
                    coeffs[int(x_cols[j])] = -float(S[i, j])
            if W is not None:
                for j in np.flatnonzero(W[i]):
                    coeffs[int(prev_cols[j])] = -float(W[i, j])
            builder.add_constraint(coeffs, GE, float(const[i]))
        prev_cols = cols
    builder.objective_offset = target_mean

    program, summary = finish_program(builder, "ICNN", first_stage.n, hidden)
    logger.info(f"ICNN LP embedding: {summary.n_continuous} continuous, {summary.n_integer} integer, "
                f"{summary.n_rows} rows")
    return EmbeddedModel(program=program, x_indices=x_cols, output_index=out_col, size_summary=summary,
                         hidden_dims=tuple(p.hidden_dims), target_mean=target_mean, target_std=target_std)
