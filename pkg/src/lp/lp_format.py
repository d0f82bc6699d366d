"""
Plain-text interchange format for linear programs.

    minimize: 1.0*x0 + -2.0*x1 + 3.5
    subject to:
    c0: 1.0*x0 + 1.0*x1 <= 4.0
    c1: 1.0*x0 + -1.0*x1 = 0.0
    bounds:
    x0 0.0 inf
    x1 -inf 10.0
    integers: x1
    end

Terms are separated by " + " and written as coef*name; a bare number in the
objective is the constant offset. Coefficients use repr() so text round-trips exactly.
Lines starting with '#' are ignored.
"""

import logging
from pathlib import Path
from typing import Dict, Iterable, List, Tuple, Union

import numpy as np

from src.errors import FormatError
from .program import MAXIMIZE, MINIMIZE, SENSES, LinearProgram, ProgramBuilder

logger = logging.getLogger(__name__)


def _fmt(value: float) -> str:
    if value == np.inf:
        return "inf"
    if value == -np.inf:
        return "-inf"
    return repr(float(value))


def _terms(coefs: Iterable[Tuple[float, str]]) -> str:
    parts = [f"{_fmt(v)}*{name}" for v, name in coefs]
    return " + ".join(parts) if parts else "0"


def write_lp_text(lp: LinearProgram, integer_vars: Iterable[int] = ()) -> str:
    names = lp.names()
    lines = []

    objective = [(lp.objective[j], names[j]) for j in range(lp.n_vars) if lp.objective[j] != 0.0]
    obj_text = _terms(objective)
    if lp.objective_offset != 0.0:
        obj_text = f"{obj_text} + {_fmt(lp.objective_offset)}" if objective else _fmt(lp.objective_offset)
    lines.append(f"{lp.sense}: {obj_text}")

    lines.append("subject to:")
    csr = lp.matrix
    for i in range(lp.n_rows):
        start, end = csr.indptr[i], csr.indptr[i + 1]
        row = [(csr.data[k], names[csr.indices[k]]) for k in range(start, end)]
        lines.append(f"c{i}: {_terms(row)} {lp.senses[i]} {_fmt(lp.rhs[i])}")

    lines.append("bounds:")
    for j in range(lp.n_vars):
        lines.append(f"{names[j]} {_fmt(lp.lower[j])} {_fmt(lp.upper[j])}")

    integers = sorted(set(int(j) for j in integer_vars))
    if integers:
        lines.append("integers: " + " ".join(names[j] for j in integers))
    lines.append("end")
    return "\n".join(lines) + "\n"


def _parse_terms(text: str, index: Dict[str, int], lineno: int) -> Tuple[Dict[int, float], float]:
    coeffs: Dict[int, float] = {}
    constant = 0.0
    for raw in text.split(" + "):
        token = raw.strip()
        if not token:
            raise FormatError(f"line {lineno}: empty term")
        try:
            if "*" in token:
                coef, name = token.split("*", 1)
                if name not in index:
                    raise FormatError(f"line {lineno}: undeclared variable '{name}'")
                coeffs[index[name]] = coeffs.get(index[name], 0.0) + float(coef)
            else:
                constant += float(token)
        except ValueError as e:
            raise FormatError(f"line {lineno}: bad term '{token}'") from e
    return coeffs, constant


def read_lp_text(text: str) -> Tuple[LinearProgram, List[int]]:
    """Parse the interchange format; returns the program and its integer variable indices"""
    lines = [(k + 1, line.strip()) for k, line in enumerate(text.splitlines())]
    lines = [(k, line) for k, line in lines if line and not line.startswith("#")]
    if not lines:
        raise FormatError("empty LP text")

    # bounds come last but declare the variables, so scan them first
    sections: Dict[str, List[Tuple[int, str]]] = {"objective": [], "rows": [], "bounds": [], "integers": []}
    sense = None
    current = None
    for lineno, line in lines:
        head = line.split(":", 1)[0].strip()
        if head in (MINIMIZE, MAXIMIZE) and current is None:
            sense = head
            sections["objective"].append((lineno, line.split(":", 1)[1]))
            current = "objective"
        elif line == "subject to:":
            current = "rows"
        elif line == "bounds:":
            current = "bounds"
        elif head == "integers":
            sections["integers"].append((lineno, line.split(":", 1)[1]))
            current = "integers"
        elif line == "end":
            break
        elif current in ("rows", "bounds"):
            sections[current].append((lineno, line))
        else:
            raise FormatError(f"line {lineno}: unexpected content '{line}'")
    if sense is None:
        raise FormatError("missing objective line")

    builder = ProgramBuilder()
    builder.sense = sense
    index: Dict[str, int] = {}
    for lineno, line in sections["bounds"]:
        parts = line.split()
        if len(parts) != 3:
            raise FormatError(f"line {lineno}: bounds need 'name lower upper'")
        name, lo, hi = parts
        if name in index:
            raise FormatError(f"line {lineno}: variable '{name}' declared twice")
        try:
            index[name] = builder.add_variable(float(lo), float(hi), 0.0, name)
        except ValueError as e:
            raise FormatError(f"line {lineno}: bad bound value") from e

    lineno, obj_text = sections["objective"][0]
    coeffs, constant = _parse_terms(obj_text.strip(), index, lineno)
    for j, v in coeffs.items():
        builder.costs[j] = v
    builder.objective_offset = constant

    for lineno, line in sections["rows"]:
        if ":" not in line:
            raise FormatError(f"line {lineno}: constraint needs a label")
        body = line.split(":", 1)[1].strip()
        parts = body.rsplit(" ", 2)
        if len(parts) != 3 or parts[1] not in SENSES:
            raise FormatError(f"line {lineno}: constraint must end with '<sense> rhs'")
        lhs, row_sense, rhs = parts
        coeffs, constant = _parse_terms(lhs, index, lineno)
        if constant != 0.0:
            raise FormatError(f"line {lineno}: constants are not allowed on the left-hand side")
        try:
            builder.add_constraint(coeffs, row_sense, float(rhs))
        except ValueError as e:
            raise FormatError(f"line {lineno}: bad right-hand side '{rhs}'") from e

    integers: List[int] = []
    for lineno, line in sections["integers"]:
        for name in line.split():
            if name not in index:
                raise FormatError(f"line {lineno}: undeclared integer variable '{name}'")
            integers.append(index[name])

    try:
        return builder.build_lp(), sorted(integers)
    except ValueError as e:
        raise FormatError(str(e)) from e


def save_lp(path: Union[str, Path], lp: LinearProgram, integer_vars: Iterable[int] = ()):
    Path(path).write_text(write_lp_text(lp, integer_vars))
    logger.info(f"Wrote LP with {lp.n_vars} variables and {lp.n_rows} rows to {path}")


def load_lp(path: Union[str, Path]) -> Tuple[LinearProgram, List[int]]:
    return read_lp_text(Path(path).read_text())
