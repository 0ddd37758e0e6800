"""Thin einsum wrapper taking arbitrary hashable axis ids.

numpy's integer-subscript form only accepts ids in [0, 52); callers here
generate ids like (subsystem, copy) pairs, so renumber them first.
"""

from __future__ import annotations

from typing import Hashable, Sequence

import numpy as np


def contract(
    operands: Sequence[np.ndarray],
    subscripts: Sequence[Sequence[Hashable]],
    out: Sequence[Hashable],
) -> np.ndarray:
    mapping: dict[Hashable, int] = {}

    def renumber(ids: Sequence[Hashable]) -> list[int]:
        return [mapping.setdefault(i, len(mapping)) for i in ids]

    args: list = []
    for op, ids in zip(operands, subscripts, strict=True):
        args.extend([op, renumber(ids)])
    args.append(renumber(out))
    if len(mapping) >= 52:
        raise ValueError(f"contraction needs {len(mapping)} axis ids; einsum allows 52")
    return np.einsum(*args, optimize=True)
