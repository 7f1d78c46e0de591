"""1D elementary cellular automata with periodic boundary.

Rows are uint8 arrays of 0/1 cells; all operations act along the last axis,
so a (k, L) array evolves k independent rows in one call.  The reversible
construction is second order: s[t+1] = step(s[t]) XOR s[t-1], which is exactly
invertible via s[t-1] = step(s[t]) XOR s[t+1].
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError

_TABLES = np.array(
    [[(rule >> k) & 1 for k in range(8)] for rule in range(256)], dtype=np.uint8
)


def _check_rule(rule: int) -> int:
    rule = int(rule)
    if not 0 <= rule <= 255:
        raise ValueError(f"rule number must be in [0, 255], got {rule}")
    return rule


def _check_row(row: np.ndarray) -> np.ndarray:
    row = np.asarray(row, dtype=np.uint8)
    if row.shape[-1] < 3:
        raise DimensionError(f"row length must be >= 3, got {row.shape[-1]}")
    return row


def ca_step(row: np.ndarray, rule: int) -> np.ndarray:
    """One update of every cell: output bit = rule-table[4*left + 2*self + right]."""
    row = _check_row(row)
    table = _TABLES[_check_rule(rule)]
    idx = 4 * np.roll(row, 1, axis=-1) + 2 * row + np.roll(row, -1, axis=-1)
    return table[idx]


def iterate_irreversible(row: np.ndarray, rule: int, rep: int) -> np.ndarray:
    """Apply ca_step rep times (rep = 0 returns the row unchanged)."""
    if rep < 0:
        raise ValueError(f"rep must be >= 0, got {rep}")
    row = _check_row(row)
    for _ in range(rep):
        row = ca_step(row, rule)
    return row


def second_order_evolve(
    prev: np.ndarray, curr: np.ndarray, rule: int, rep: int
) -> tuple[np.ndarray, np.ndarray]:
    """Advance the pair (s[t-1], s[t]) by rep second-order steps.

    Returns the trailing pair (s[t+rep-1], s[t+rep]).
    """
    if rep < 1:
        raise ValueError(f"rep must be >= 1, got {rep}")
    prev = _check_row(prev)
    curr = _check_row(curr)
    if prev.shape != curr.shape:
        raise DimensionError(f"row shapes differ: {prev.shape} vs {curr.shape}")
    for _ in range(rep):
        prev, curr = curr, ca_step(curr, rule) ^ prev
    return prev, curr


def second_order_reverse(
    prev_out: np.ndarray, curr_out: np.ndarray, rule: int, rep: int
) -> tuple[np.ndarray, np.ndarray]:
    """Exact inverse of second_order_evolve with the same rule and rep."""
    if rep < 1:
        raise ValueError(f"rep must be >= 1, got {rep}")
    prev_out = _check_row(prev_out)
    curr_out = _check_row(curr_out)
    if prev_out.shape != curr_out.shape:
        raise DimensionError(f"row shapes differ: {prev_out.shape} vs {curr_out.shape}")
    for _ in range(rep):
        prev_out, curr_out = ca_step(prev_out, rule) ^ curr_out, prev_out
    return prev_out, curr_out
