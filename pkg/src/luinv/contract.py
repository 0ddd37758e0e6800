"""Generic invariant evaluation straight from the index-contraction scheme.

A grade-m label assigns one permutation of {1..m} per subsystem.  For a
density matrix, write m copies of rho and contract the column index of copy
l on subsystem j with the row index of copy sigma_j(l); for a pure state,
write m copies of psi and conj(psi), contract subsystem j < k of the l-th
conj(psi) with the sigma_j(l)-th psi, and subsystem k within the l-th pair
(pure labels therefore carry k-1 permutations).

Two strategies are provided and must agree to 1e-12 relative:

- ``method="einsum"``: the whole m-copy network handed to numpy.einsum with
  an optimized pairwise path, so the m-fold tensor power is never formed;
- ``method="loop"``: a literal nested loop over all index assignments,
  O((prod n)^m); the independent oracle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Union

from ._einsum import contract as _contract
from .errors import ResourceLimitError, VerificationError
from .perms import OrbitLabel, PermTuple
from .states import DensityMatrix, PureState, partial_trace, projector

#: Cap on (prod n)^m * m for a single naive-loop evaluation.
_EVAL_TERM_LIMIT = 20_000_000

Label = Union[PermTuple, OrbitLabel]


@dataclass(frozen=True)
class InvariantSpec:
    """A label bundled with its interpretation."""

    label: OrbitLabel
    kind: str  # "pure" (r = k-1) or "mixed" (r = k)

    def __post_init__(self):
        if self.kind not in ("pure", "mixed"):
            raise ValueError(f"kind must be 'pure' or 'mixed', got {self.kind!r}")

    @property
    def m(self) -> int:
        return self.label.m

    @property
    def r(self) -> int:
        return self.label.r

    @property
    def k(self) -> int:
        return self.r + 1 if self.kind == "pure" else self.r


def as_tuple(label: Label) -> PermTuple:
    return label.rep if isinstance(label, OrbitLabel) else label


def _guard_eval(total_dim: int, m: int, method: str):
    if method == "loop" and total_dim**m * m > _EVAL_TERM_LIMIT:
        raise ResourceLimitError(
            f"naive contraction over {total_dim}^{m} terms exceeds the guard"
        )


def eval_mixed(sigma: Label, rho: DensityMatrix, method: str = "einsum") -> complex:
    """Invariant value for a mixed-state label (r = k entries)."""
    sigma = as_tuple(sigma)
    if sigma.r != rho.k:
        raise ValueError(f"label arity {sigma.r} does not match {rho.k} subsystems")
    _guard_eval(math.prod(rho.dims), sigma.m, method)
    if method == "einsum":
        return _mixed_einsum(sigma, rho)
    if method == "loop":
        return _mixed_loop(sigma, rho)
    raise ValueError(f"unknown method {method!r}")


def eval_pure(sigma: Label, psi: PureState, method: str = "einsum") -> complex:
    """Invariant value for a pure-state label (r = k-1 entries)."""
    sigma = as_tuple(sigma)
    if sigma.r != psi.k - 1:
        raise ValueError(f"label arity {sigma.r} does not match {psi.k} subsystems (need k-1)")
    _guard_eval(math.prod(psi.dims), sigma.m, method)
    if method == "einsum":
        return _pure_einsum(sigma, psi)
    if method == "loop":
        return _pure_loop(sigma, psi)
    raise ValueError(f"unknown method {method!r}")


def eval_pure_via_mixed(sigma: Label, psi: PureState, rtol: float = 1e-10) -> complex:
    """Evaluate a pure label three ways and cross-check:

    directly, as the embedded label (sigma, e) on |psi><psi|, and as sigma on
    the reduction of |psi><psi| over the last subsystem.  Raises
    VerificationError if the routes disagree beyond rtol.
    """
    sigma = as_tuple(sigma)
    direct = eval_pure(sigma, psi)
    pi = projector(psi)
    embedded = eval_mixed(sigma.embed(), pi)
    reduced = eval_mixed(sigma, partial_trace(pi, {psi.k}))
    scale = max(abs(direct), abs(embedded), abs(reduced), 1e-300)
    worst = max(abs(direct - embedded), abs(direct - reduced)) / scale
    if worst > rtol:
        raise VerificationError(
            f"pure/mixed evaluation routes disagree by {worst:.3e} (rtol {rtol})"
        )
    return direct


# -- einsum strategy ----------------------------------------------------------
#
# Axis ids are (j, l) pairs: the summation index on subsystem j shared by
# copy l's row slot and copy sigma_j(l)'s column slot.


def _mixed_einsum(sigma: PermTuple, rho: DensityMatrix) -> complex:
    m, k = sigma.m, sigma.r
    tensor = rho.tensor()
    operands, subscripts = [], []
    for l in range(1, m + 1):
        rows = [(j, l) for j in range(1, k + 1)]
        cols = [(j, sigma.perms[j - 1](l)) for j in range(1, k + 1)]
        operands.append(tensor)
        subscripts.append(rows + cols)
    return complex(_contract(operands, subscripts, []))


def _pure_einsum(sigma: PermTuple, psi: PureState) -> complex:
    m, k = sigma.m, psi.k
    amp = psi.amplitudes
    conj = amp.conj()
    operands, subscripts = [], []
    for l in range(1, m + 1):
        operands.append(amp)
        subscripts.append([(j, l) for j in range(1, k + 1)])
    for l in range(1, m + 1):
        cols = [(j, sigma.perms[j - 1](l)) for j in range(1, k)]
        operands.append(conj)
        subscripts.append(cols + [(k, l)])
    return complex(_contract(operands, subscripts, []))


# -- naive loop strategy -------------------------------------------------------


def _index_tables(dims: tuple[int, ...]):
    n = math.prod(dims)
    unravel = list(itertools.product(*[range(d) for d in dims]))
    strides = []
    acc = 1
    for d in reversed(dims):
        strides.append(acc)
        acc *= d
    strides = list(reversed(strides))
    return n, unravel, strides


def _mixed_loop(sigma: PermTuple, rho: DensityMatrix) -> complex:
    m, k = sigma.m, sigma.r
    n, unravel, strides = _index_tables(rho.dims)
    entries = rho.entries
    perms = sigma.perms
    total = 0j
    for flat_rows in itertools.product(range(n), repeat=m):
        rows = [unravel[f] for f in flat_rows]
        term = 1 + 0j
        for l in range(m):
            col_flat = 0
            for j in range(k):
                col_flat += rows[perms[j](l + 1) - 1][j] * strides[j]
            term *= entries[flat_rows[l], col_flat]
        total += term
    return total


def _pure_loop(sigma: PermTuple, psi: PureState) -> complex:
    m, k = sigma.m, psi.k
    n, unravel, strides = _index_tables(psi.dims)
    vec = psi.vector()
    cvec = vec.conj()
    perms = sigma.perms
    total = 0j
    for flat_rows in itertools.product(range(n), repeat=m):
        rows = [unravel[f] for f in flat_rows]
        term = 1 + 0j
        for f in flat_rows:
            term *= vec[f]
        for l in range(m):
            col_flat = 0
            for j in range(k - 1):
                col_flat += rows[perms[j](l + 1) - 1][j] * strides[j]
            col_flat += rows[l][k - 1] * strides[k - 1]
            term *= cvec[col_flat]
        total += term
    return total
