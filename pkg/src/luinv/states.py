"""Dense complex tensors for multipartite quantum states.

A pure state on subsystems of dimensions (n_1, ..., n_k) is a complex array
of that shape; a density matrix is an N x N array with N = prod(n_j), both
row and column indices factored row-major (subsystem 1 slowest).  Subsystem
indices are 1-based everywhere in the public API, matching the positions of
permutation entries in invariant labels.

Neither norm nor trace is normalized by construction; the invariant
polynomials are homogeneous, so callers may scale freely.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from ._einsum import contract as _contract
from .errors import ResourceLimitError

#: Default cap on the total Hilbert-space dimension prod(n_j).
DEFAULT_DIM_LIMIT = 4096

_dim_limit = DEFAULT_DIM_LIMIT


def dim_limit() -> int:
    return _dim_limit


def set_dim_limit(limit: int) -> None:
    """Raise or lower the total-dimension guard (CLI: --dim-limit)."""
    global _dim_limit
    if limit < 1:
        raise ValueError("dimension limit must be positive")
    _dim_limit = limit


def check_dims(dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(n) for n in dims)
    if not dims or any(n < 1 for n in dims):
        raise ValueError(f"subsystem dimensions must be positive integers: {dims}")
    total = math.prod(dims)
    if total > _dim_limit:
        raise ResourceLimitError(
            f"total dimension {total} exceeds limit {_dim_limit}; "
            "raise it with set_dim_limit / --dim-limit"
        )
    return dims


@dataclass(frozen=True, eq=False)
class PureState:
    """State vector stored as a tensor of shape dims."""

    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = check_dims(self.dims)
        object.__setattr__(self, "dims", dims)
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != dims:
            raise ValueError(f"amplitude shape {amp.shape} does not match dims {dims}")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def k(self) -> int:
        return len(self.dims)

    def vector(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Operator on the product space, stored as a prod(dims) square matrix.
    Hermiticity is not enforced at construction (linear-algebra identities
    are tested on general matrices); samplers and the file reader do check."""

    dims: tuple[int, ...]
    entries: np.ndarray

    def __post_init__(self):
        dims = check_dims(self.dims)
        object.__setattr__(self, "dims", dims)
        mat = np.asarray(self.entries, dtype=complex)
        n = math.prod(dims)
        if mat.shape != (n, n):
            raise ValueError(f"entry shape {mat.shape} does not match dims {dims}")
        object.__setattr__(self, "entries", mat)

    @property
    def k(self) -> int:
        return len(self.dims)

    def tensor(self) -> np.ndarray:
        """View with one row axis and one column axis per subsystem."""
        return self.entries.reshape(self.dims + self.dims)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))


State = Union[PureState, DensityMatrix]


def is_hermitian(rho: DensityMatrix, tol: float = 1e-12) -> bool:
    scale = np.abs(rho.entries).max() or 1.0
    return bool(np.abs(rho.entries - rho.entries.conj().T).max() <= tol * scale)


def _check_subsystems(subs: Iterable[int], k: int) -> tuple[int, ...]:
    subs = tuple(sorted(set(int(j) for j in subs)))
    for j in subs:
        if not 1 <= j <= k:
            raise ValueError(f"subsystem index {j} out of range 1..{k}")
    return subs


def projector(psi: PureState) -> DensityMatrix:
    """Rank-one projector |psi><psi| (trace = squared norm)."""
    v = psi.vector()
    return DensityMatrix(psi.dims, np.outer(v, v.conj()))


def partial_trace(rho: DensityMatrix, traced: Iterable[int]) -> DensityMatrix:
    """Trace out the listed subsystems; the result lives on the complement.
    Tracing everything yields a 1x1 matrix holding the full trace."""
    traced = _check_subsystems(traced, rho.k)
    if not traced:
        return rho
    keep = [j for j in range(1, rho.k + 1) if j not in traced]
    k = rho.k
    subs = [("t", j) if j in traced else ("r", j) for j in range(1, k + 1)]
    subs += [("t", j) if j in traced else ("c", j) for j in range(1, k + 1)]
    out = [("r", j) for j in keep] + [("c", j) for j in keep]
    reduced = _contract([rho.tensor()], [subs], out)
    new_dims = tuple(rho.dims[j - 1] for j in keep) or (1,)
    n = math.prod(new_dims)
    return DensityMatrix(new_dims, reduced.reshape(n, n))


def partial_transpose(rho: DensityMatrix, subsystems: Iterable[int]) -> DensityMatrix:
    """Swap row and column indices on the listed subsystems (involutive)."""
    subs = _check_subsystems(subsystems, rho.k)
    if not subs:
        return rho
    t = rho.tensor()
    axes = list(range(2 * rho.k))
    for j in subs:
        axes[j - 1], axes[rho.k + j - 1] = axes[rho.k + j - 1], axes[j - 1]
    n = math.prod(rho.dims)
    return DensityMatrix(rho.dims, t.transpose(axes).reshape(n, n))


def tensor_with_identity(
    rho: DensityMatrix, id_set: Iterable[int], full_dims: Sequence[int]
) -> DensityMatrix:
    """Insert identity factors at the id_set positions of full_dims, placing
    rho's subsystems (in order) on the remaining positions.

    A fully traced rho (1x1 matrix) against id_set = all positions becomes a
    scalar multiple of the identity.
    """
    full_dims = check_dims(full_dims)
    k_full = len(full_dims)
    id_set = _check_subsystems(id_set, k_full)
    rest = [j for j in range(1, k_full + 1) if j not in id_set]
    expected = tuple(full_dims[j - 1] for j in rest) or (1,)
    if rho.dims != expected:
        raise ValueError(
            f"operator dims {rho.dims} do not match non-identity slots {expected}"
        )
    if not id_set:
        return rho

    scalar = 1.0 + 0j
    operands, subscripts = [], []
    if rho.dims == (1,) and not rest:
        scalar = complex(rho.entries[0, 0])
    else:
        operands.append(rho.tensor())
        subscripts.append([("r", j) for j in rest] + [("c", j) for j in rest])
    for j in id_set:
        operands.append(np.eye(full_dims[j - 1], dtype=complex))
        subscripts.append([("r", j), ("c", j)])
    out = [("r", j) for j in range(1, k_full + 1)] + [("c", j) for j in range(1, k_full + 1)]
    full = _contract(operands, subscripts, out)
    n = math.prod(full_dims)
    return DensityMatrix(full_dims, scalar * full.reshape(n, n))


def random_pure(dims: Sequence[int], seed: int) -> PureState:
    """I.i.d. standard complex Gaussian amplitudes (PCG64 stream from seed)."""
    dims = check_dims(dims)
    rng = np.random.default_rng(seed)
    amp = rng.standard_normal(dims) + 1j * rng.standard_normal(dims)
    return PureState(dims, amp)


def random_density(dims: Sequence[int], seed: int, rank: int | None = None) -> DensityMatrix:
    """Wishart-type Hermitian PSD matrix A A^dagger with A of shape (N, rank)."""
    dims = check_dims(dims)
    n = math.prod(dims)
    if rank is None:
        rank = n
    if rank < 1:
        raise ValueError("rank must be >= 1")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    return DensityMatrix(dims, a @ a.conj().T)


def random_hermitian(dims: Sequence[int], seed: int) -> DensityMatrix:
    """Hermitian (not necessarily PSD) matrix (B + B^dagger)/2, entries O(1)."""
    dims = check_dims(dims)
    n = math.prod(dims)
    rng = np.random.default_rng(seed)
    b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return DensityMatrix(dims, (b + b.conj().T) / 2)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed n x n unitary: QR of a Ginibre matrix with the R
    diagonal phase divided out (Mezzadri construction)."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_local_unitaries(dims: Sequence[int], seed: int) -> list[np.ndarray]:
    dims = check_dims(dims)
    rng = np.random.default_rng(seed)
    return [haar_unitary(n, rng) for n in dims]


def _check_unitary_shapes(dims: tuple[int, ...], us: Sequence[np.ndarray]):
    if len(us) != len(dims):
        raise ValueError(f"expected {len(dims)} unitaries, got {len(us)}")
    for j, (n, u) in enumerate(zip(dims, us), start=1):
        if np.shape(u) != (n, n):
            raise ValueError(f"unitary {j} has shape {np.shape(u)}, expected ({n}, {n})")


def apply_local_unitaries(psi: PureState, us: Sequence[np.ndarray]) -> PureState:
    """(U_1 x ... x U_k) psi."""
    _check_unitary_shapes(psi.dims, us)
    amp = psi.amplitudes
    k = psi.k
    for j, u in enumerate(us):
        amp = np.tensordot(u, amp, axes=([1], [j]))
        amp = np.moveaxis(amp, 0, j)
    return PureState(psi.dims, amp)


def apply_local_unitaries_mixed(rho: DensityMatrix, us: Sequence[np.ndarray]) -> DensityMatrix:
    """(U_1 x ... x U_k) rho (U_1 x ... x U_k)^dagger."""
    _check_unitary_shapes(rho.dims, us)
    full = us[0]
    for u in us[1:]:
        full = np.kron(full, u)
    return DensityMatrix(rho.dims, full @ rho.entries @ full.conj().T)


def purify(rho: DensityMatrix, tol: float = 1e-12) -> PureState:
    """Pure state on dims + (rank,) whose reduction over the appended
    subsystem reproduces rho: phi = sum_i sqrt(lambda_i) |v_i>|i>.

    Raises ValueError if rho has an eigenvalue below -1e-9 * ||rho||.
    """
    h = (rho.entries + rho.entries.conj().T) / 2
    if np.abs(h - rho.entries).max() > 1e-9 * max(np.abs(rho.entries).max(), 1e-300):
        raise ValueError("purify requires a Hermitian matrix")
    vals, vecs = np.linalg.eigh(h)
    scale = max(float(np.abs(vals).max()), 1e-300)
    if vals.min() < -1e-9 * scale:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {vals.min():.3e})")
    keep = vals > tol * scale
    rank = max(int(keep.sum()), 1)
    order = np.argsort(vals)[::-1][:rank]
    amp = np.zeros((math.prod(rho.dims), rank), dtype=complex)
    for i, idx in enumerate(order):
        amp[:, i] = np.sqrt(max(vals[idx], 0.0)) * vecs[:, idx]
    return PureState(rho.dims + (rank,), amp.reshape(rho.dims + (rank,)))


# -- state files --------------------------------------------------------------
#
# JSON schema: {"dims": [n1, ..., nk], "kind": "pure"|"mixed",
#               "data": nested arrays of [re, im]}
# pure data is nested by subsystem (shape dims); mixed data is the square
# matrix as rows.  Floats are written with Python's shortest round-trip repr,
# which is exact for float64.


def _complex_to_pairs(arr: np.ndarray):
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [_complex_to_pairs(sub) for sub in arr]


def _pairs_to_complex(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise ValueError("state data entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def save_state(state: State, path) -> None:
    if isinstance(state, PureState):
        doc = {"dims": list(state.dims), "kind": "pure",
               "data": _complex_to_pairs(state.amplitudes)}
    elif isinstance(state, DensityMatrix):
        doc = {"dims": list(state.dims), "kind": "mixed",
               "data": _complex_to_pairs(state.entries)}
    else:
        raise TypeError(f"not a state: {type(state)!r}")
    with open(path, "w", encoding="utf-8") as fp:
        json.dump(doc, fp)
        fp.write("\n")


def load_state(path) -> State:
    with open(path, "r", encoding="utf-8") as fp:
        doc = json.load(fp)
    try:
        dims = tuple(int(n) for n in doc["dims"])
        kind = doc["kind"]
        data = doc["data"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed state file {path}: {exc}") from exc
    arr = _pairs_to_complex(data)
    if kind == "pure":
        if arr.shape != dims:
            raise ValueError(f"pure data shape {arr.shape} does not match dims {dims}")
        return PureState(dims, arr)
    if kind == "mixed":
        n = math.prod(dims)
        if arr.shape != (n, n):
            raise ValueError(f"mixed data shape {arr.shape} does not match dims {dims}")
        rho = DensityMatrix(dims, arr)
        if not is_hermitian(rho, tol=1e-10):
            raise ValueError("mixed state file is not Hermitian")
        return rho
    raise ValueError(f"unknown state kind {kind!r}")
