"""
Divided differences.

The triangular table [y_i, ..., y_{i+j}], the matrix taking values to the
top row of that table, its determinant, and Newton-form evaluation.
"""

from typing import Sequence

import numpy as np


def _check_increasing(xs: Sequence[float]) -> np.ndarray:
    nodes = np.asarray(xs, dtype=float)
    if nodes.ndim != 1 or nodes.size == 0:
        raise ValueError("Nodes must be a non-empty one-dimensional sequence")
    if np.any(np.diff(nodes) <= 0):
        raise ValueError(f"Nodes must be strictly increasing, got {nodes.tolist()}")
    return nodes


def divided_differences(xs: Sequence[float], ys: Sequence[float]) -> np.ndarray:
    """
    Top row [y_0], [y_0, y_1], ..., [y_0, ..., y_k] of the divided difference table.

    Raises:
        ValueError: If xs is not strictly increasing or the lengths differ
    """
    nodes = _check_increasing(xs)
    table = np.array(ys, dtype=float)
    if table.shape != nodes.shape:
        raise ValueError(f"Got {nodes.size} nodes and {table.size} values")

    top = [table[0]]
    for j in range(1, nodes.size):
        # column j from column j - 1, in place
        table[: nodes.size - j] = (table[1 : nodes.size - j + 1] - table[: nodes.size - j]) / (nodes[j:] - nodes[:-j])
        top.append(table[0])
    return np.array(top)


def delta_matrix(xs: Sequence[float]) -> np.ndarray:
    """
    Lower-triangular matrix sending (y_0..y_k) to the top row of divided differences.

    Row j holds 1 / prod_{m <= j, m != i} (x_i - x_m) in column i <= j.
    """
    nodes = _check_increasing(xs)
    size = nodes.size
    matrix = np.zeros((size, size))
    for j in range(size):
        for i in range(j + 1):
            others = np.delete(nodes[: j + 1], i)
            matrix[j, i] = 1.0 / np.prod(nodes[i] - others)
    return matrix


def delta_det(xs: Sequence[float]) -> float:
    """prod_{i<j} (x_j - x_i)^-1, summed in log space."""
    nodes = _check_increasing(xs)
    gaps = nodes[None, :] - nodes[:, None]
    upper = np.triu_indices(nodes.size, k=1)
    return float(np.exp(-np.sum(np.log(gaps[upper]))))


def newton_eval(xs: Sequence[float], coeffs: Sequence[float], t):
    """Nested evaluation of sum_j c_j prod_{m<j} (t - x_m)."""
    nodes = np.asarray(xs, dtype=float)
    c = np.asarray(coeffs, dtype=float)
    if c.size != nodes.size:
        raise ValueError(f"Got {nodes.size} nodes and {c.size} coefficients")
    value = np.full(np.shape(t), c[-1], dtype=float)
    for j in range(c.size - 2, -1, -1):
        value = value * (np.asarray(t, dtype=float) - nodes[j]) + c[j]
    return value if np.ndim(t) else float(value)
