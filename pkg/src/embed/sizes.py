from pathlib import Path
from typing import Iterable, Optional, Tuple, Union

import pandas as pd

from src.lp import LinearProgram
from .model import EmbeddedModel, SizeSummary


def count_variables(model: EmbeddedModel) -> SizeSummary:
    """Recount the columns of an embedded program by class"""
    program = model.program
    lp = model.lp
    if isinstance(program, LinearProgram):
        integers, binaries = frozenset(), frozenset()
    else:
        integers, binaries = program.integer_vars, program.binary_vars
    first = set(int(j) for j in model.x_indices)
    return SizeSummary(
        method=model.size_summary.method,
        n_continuous=lp.n_vars - len(integers),
        n_integer=len(integers),
        n_binary=len(binaries),
        n_rows=lp.n_rows,
        aux_continuous=sum(1 for j in range(lp.n_vars) if j not in first and j not in integers),
        aux_binary=len(set(binaries) - first),
        hidden_neurons=model.size_summary.hidden_neurons,
    )


def architecture_parity(icnn: EmbeddedModel, relu: EmbeddedModel) -> bool:
    return tuple(icnn.hidden_dims) == tuple(relu.hidden_dims)


def size_summary_table(pairs: Iterable[Tuple[str, EmbeddedModel, EmbeddedModel]]) -> pd.DataFrame:
    """
    One row per instance comparing the ICNN and ReLU embeddings: total continuous
    and integer columns, auxiliary counts and whether both networks share hidden widths.
    """
    rows = []
    for instance, icnn, relu in pairs:
        a, b = count_variables(icnn), count_variables(relu)
        rows.append({
            "instance": instance,
            "icnn_continuous": a.n_continuous,
            "icnn_integer": a.n_integer,
            "relu_continuous": b.n_continuous,
            "relu_integer": b.n_integer,
            "icnn_aux_continuous": a.aux_continuous,
            "relu_aux_continuous": b.aux_continuous,
            "relu_aux_binary": b.aux_binary,
            "architecture_parity": architecture_parity(icnn, relu),
        })
    return pd.DataFrame(rows)


def save_size_summary(table: pd.DataFrame, path: Union[str, Path], csv_path: Optional[Union[str, Path]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(table.to_json(orient="records", indent=1))
    if csv_path is not None:
        table.to_csv(csv_path, index=False)
    return path
