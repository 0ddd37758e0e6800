"""Property-check harness.

Each check returns a VerifyReport: deterministic given (name, parameters,
seed), JSON-serializable, carrying the worst residual seen and a witness for
any failure.  Checks are independent and own their seeded PRNG streams.

Linear independence is only ever asserted at fixed local dimensions with
grade m <= min(n_j); algebraic independence of the transitive generators is
a statement about the limit of growing local dimensions and is not
numerically testable, so it is out of scope here (the reports say so).
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import closedform
from .contract import InvariantSpec, eval_mixed, eval_pure
from .perms import enumerate_orbits, format_label, generator_labels, sim_decompose
from .states import (
    DensityMatrix,
    PureState,
    apply_local_unitaries,
    apply_local_unitaries_mixed,
    projector,
    purify,
    random_density,
    random_local_unitaries,
    random_pure,
)

SCHEMA_VERSION = 1


@dataclass
class VerifyReport:
    check: str
    params: dict
    tolerance: float
    max_residual: float
    passed: bool
    details: dict = field(default_factory=dict)
    witness: dict | None = None

    def to_dict(self) -> dict:
        doc = dataclasses.asdict(self)
        doc["schema_version"] = SCHEMA_VERSION
        return doc


def _normalized_pure(dims, seed) -> PureState:
    psi = random_pure(dims, seed)
    return PureState(dims, psi.amplitudes / psi.norm())


def _normalized_density(dims, seed, rank=None) -> DensityMatrix:
    rho = random_density(dims, seed, rank)
    return DensityMatrix(dims, rho.entries / abs(rho.trace()))


def all_specs(dims: Sequence[int], grades: Iterable[int] = (1, 2, 3)) -> list[InvariantSpec]:
    """Every pure (r = k-1) and mixed (r = k) label of the given grades."""
    k = len(tuple(dims))
    specs = []
    for m in grades:
        for lab in enumerate_orbits(m, k - 1):
            specs.append(InvariantSpec(lab, "pure"))
        for lab in enumerate_orbits(m, k):
            specs.append(InvariantSpec(lab, "mixed"))
    return specs


def _evaluate(spec: InvariantSpec, state) -> complex:
    if spec.kind == "pure":
        return eval_pure(spec.label, state)
    return eval_mixed(spec.label, state)


def check_lu_invariance(
    specs: Sequence[InvariantSpec] | None,
    dims: Sequence[int],
    samples: int = 50,
    seed: int = 0,
    tolerance: float = 1e-9,
) -> VerifyReport:
    """Relative drift of every invariant under Haar-random local rotations."""
    dims = tuple(dims)
    if specs is None:
        specs = all_specs(dims)
    worst = 0.0
    witness = None
    for i in range(samples):
        psi = _normalized_pure(dims, seed * 100_003 + 2 * i)
        rho = _normalized_density(dims, seed * 100_003 + 2 * i + 1)
        us = random_local_unitaries(dims, seed * 900_001 + i)
        psi_rot = apply_local_unitaries(psi, us)
        rho_rot = apply_local_unitaries_mixed(rho, us)
        for spec in specs:
            state, rotated = (psi, psi_rot) if spec.kind == "pure" else (rho, rho_rot)
            a = _evaluate(spec, state)
            b = _evaluate(spec, rotated)
            drift = abs(a - b) / max(abs(a), 1e-300)
            if drift > worst:
                worst = drift
                witness = {"label": format_label(spec.label.rep), "kind": spec.kind,
                           "sample": i, "drift": drift}
    return VerifyReport(
        check="lu_invariance",
        params={"dims": list(dims), "samples": samples, "seed": seed,
                "labels": len(specs)},
        tolerance=tolerance,
        max_residual=worst,
        passed=worst < tolerance,
        witness=None if worst < tolerance else witness,
    )


def check_linear_independence(
    m: int,
    kind: str,
    dims: Sequence[int],
    seed: int = 0,
    sv_threshold: float = 1e-8,
) -> VerifyReport:
    """Numerical rank of the label-by-state value matrix over 2D random
    states.  Full rank is expected (and asserted) when m <= min(n_j)."""
    dims = tuple(dims)
    k = len(dims)
    r = k - 1 if kind == "pure" else k
    labels = enumerate_orbits(m, r)
    d = len(labels)
    n_states = 2 * d
    if kind == "pure":
        states = [_normalized_pure(dims, seed * 77_041 + i) for i in range(n_states)]
        matrix = np.array([[eval_pure(lab, s) for s in states] for lab in labels])
    else:
        states = [_normalized_density(dims, seed * 77_041 + i) for i in range(n_states)]
        matrix = np.array([[eval_mixed(lab, s) for s in states] for lab in labels])
    sv = np.linalg.svd(matrix, compute_uv=False)
    rank = int((sv > sv_threshold * sv[0]).sum())
    expect_full = m <= min(dims)
    passed = rank == d if expect_full else True
    return VerifyReport(
        check="linear_independence",
        params={"m": m, "kind": kind, "dims": list(dims), "seed": seed,
                "labels": d, "states": n_states},
        tolerance=sv_threshold,
        max_residual=float(sv[-1] / sv[0]),
        passed=passed,
        details={"rank": rank, "expected_full_rank": expect_full,
                 "note": "algebraic independence lives in the large-dimension "
                         "limit and is not numerically testable; only linear "
                         "independence at these dims is checked"},
    )


def check_class_consistency(
    m: int,
    k: int,
    seed: int = 0,
    dims: Sequence[int] | None = None,
    tolerance: float = 1e-10,
) -> VerifyReport:
    """Two-sided class coherence.

    Hard check: for every pure label, all conjugation classes in its split
    evaluate equal on projectors.  Soft check (reported, never failed): for
    random full-rank mixed states, distinct classes of the same split should
    take different values for at least one sample; absence of a witness is
    recorded as inconclusive.
    """
    if dims is None:
        dims = (2,) * k
    dims = tuple(dims)
    worst = 0.0
    witness = None
    split_results = []
    n_pure_samples = 5
    n_mixed_samples = 20
    for lab in enumerate_orbits(m, k - 1):
        split = sim_decompose(lab.rep)
        assert split.anchor.rep.perms[-1].is_identity()
        for i in range(n_pure_samples):
            psi = _normalized_pure(dims, seed * 61_543 + i)
            pi = projector(psi)
            vals = [eval_mixed(member, pi) for member in split.members]
            ref = vals[0]
            spread = max(abs(v - ref) for v in vals) / max(abs(ref), 1e-300)
            if spread > worst:
                worst = spread
                witness = {"label": format_label(lab.rep), "sample": i, "spread": spread}
        separated = 0
        pairs = 0
        for a in range(len(split.members)):
            for b in range(a + 1, len(split.members)):
                pairs += 1
                for i in range(n_mixed_samples):
                    rho = _normalized_density(dims, seed * 44_497 + i)
                    va = eval_mixed(split.members[a], rho)
                    vb = eval_mixed(split.members[b], rho)
                    if abs(va - vb) > 1e-6 * max(abs(va), abs(vb), 1e-300):
                        separated += 1
                        break
        split_results.append({
            "label": format_label(lab.rep),
            "classes": len(split.members),
            "separated_pairs": separated,
            "pairs": pairs,
            "inconclusive_pairs": pairs - separated,
        })
    return VerifyReport(
        check="class_consistency",
        params={"m": m, "k": k, "dims": list(dims), "seed": seed},
        tolerance=tolerance,
        max_residual=worst,
        passed=worst < tolerance,
        details={"splits": split_results},
        witness=None if worst < tolerance else witness,
    )


def check_purification(
    m: int,
    dims: Sequence[int],
    seed: int = 0,
    samples: int = 10,
    tolerance: float = 1e-9,
) -> VerifyReport:
    """f(rho) equals the embedded pure invariant of a purification of rho,
    for every mixed label of grade m."""
    dims = tuple(dims)
    labels = enumerate_orbits(m, len(dims))
    total_dim = math.prod(dims)
    worst = 0.0
    witness = None
    for i in range(samples):
        rank = 1 + (i % total_dim)
        rho = _normalized_density(dims, seed * 52_361 + i, rank=rank)
        phi = purify(rho)
        for lab in labels:
            a = eval_mixed(lab, rho)
            b = eval_pure(lab, phi)
            resid = abs(a - b) / max(abs(a), 1e-300)
            if resid > worst:
                worst = resid
                witness = {"label": format_label(lab.rep), "rank": rank, "residual": resid}
    return VerifyReport(
        check="purification",
        params={"m": m, "dims": list(dims), "seed": seed, "samples": samples},
        tolerance=tolerance,
        max_residual=worst,
        passed=worst < tolerance,
        witness=None if worst < tolerance else witness,
    )


def check_counts() -> VerifyReport:
    """Cardinalities of label sets and generator sets against the closed
    formulas (exact)."""
    failures = []
    for r in range(1, 6):
        got = len(enumerate_orbits(3, r))
        want = 6 ** (r - 1) + 3 ** (r - 1) + 2 ** (r - 1)
        if got != want:
            failures.append({"m": 3, "r": r, "got": got, "want": want})
        got_gen = len(generator_labels(3, r))
        # non-transitive classes have all entries in {e, t}: one per position
        # subset, 2^r of them
        want_gen = 6 ** (r - 1) + 3 ** (r - 1) - 2 ** (r - 1)
        if got_gen != want_gen:
            failures.append({"m": 3, "r": r, "generators": got_gen, "want": want_gen})
    for r in range(1, 6):
        if len(enumerate_orbits(2, r)) != 2 ** r:
            failures.append({"m": 2, "r": r, "got": len(enumerate_orbits(2, r))})
        if len(generator_labels(2, r)) != 2 ** r - 1:
            failures.append({"m": 2, "r": r, "generators": len(generator_labels(2, r))})
    return VerifyReport(
        check="counts",
        params={"m": [2, 3], "r": "1..5"},
        tolerance=0.0,
        max_residual=float(len(failures)),
        passed=not failures,
        details={"failures": failures},
    )


def check_closed_forms(
    dims: Sequence[int],
    samples: int = 10,
    seed: int = 0,
    tolerance: float = 1e-10,
) -> VerifyReport:
    """Closed-form evaluators against the contraction evaluator on random
    states, every label of grades 1-3, both kinds."""
    dims = tuple(dims)
    worst = 0.0
    witness = None
    specs = all_specs(dims)
    for i in range(samples):
        psi = _normalized_pure(dims, seed * 39_989 + 2 * i)
        rho = _normalized_density(dims, seed * 39_989 + 2 * i + 1)
        for spec in specs:
            state = psi if spec.kind == "pure" else rho
            a = _evaluate(spec, state)
            b = closedform.closed_form(spec.label, spec.kind, state)
            resid = abs(a - b) / max(abs(a), abs(b), 1e-300)
            if resid > worst:
                worst = resid
                witness = {"label": format_label(spec.label.rep), "kind": spec.kind,
                           "sample": i, "residual": resid}
    return VerifyReport(
        check="closed_forms",
        params={"dims": list(dims), "samples": samples, "seed": seed,
                "labels": len(specs)},
        tolerance=tolerance,
        max_residual=worst,
        passed=worst < tolerance,
        witness=None if worst < tolerance else witness,
    )


SUITES = {
    "counts": lambda seed, dims: [check_counts()],
    "lu": lambda seed, dims: [check_lu_invariance(None, dims, samples=20, seed=seed)],
    "closed": lambda seed, dims: [check_closed_forms(dims, samples=10, seed=seed)],
    "independence": lambda seed, dims: [
        check_linear_independence(m, kind, dims, seed=seed)
        for m in (2, 3)
        for kind in ("pure", "mixed")
    ],
    "classes": lambda seed, dims: [
        check_class_consistency(m, len(dims), seed=seed, dims=dims) for m in (2, 3)
    ],
    "purification": lambda seed, dims: [
        check_purification(m, dims, seed=seed) for m in (1, 2, 3)
    ],
}


def run_suite(name: str, seed: int = 0, dims: Sequence[int] = (2, 2)) -> list[VerifyReport]:
    """Run one named suite, or all of them with name="all"."""
    dims = tuple(dims)
    if name == "all":
        reports = []
        for key in SUITES:
            reports.extend(SUITES[key](seed, dims))
        return reports
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    return SUITES[name](seed, dims)


def render_table(reports: Sequence[VerifyReport]) -> str:
    lines = []
    header = f"{'check':<22} {'status':<6} {'max residual':>14} {'tolerance':>10}  parameters"
    lines.append(header)
    lines.append("-" * len(header))
    for rep in reports:
        status = "pass" if rep.passed else "FAIL"
        params = ", ".join(f"{k}={v}" for k, v in rep.params.items())
        lines.append(
            f"{rep.check:<22} {status:<6} {rep.max_residual:>14.3e} {rep.tolerance:>10.0e}  {params}"
        )
    return "\n".join(lines)


def reports_to_json(reports: Sequence[VerifyReport]) -> str:
    return json.dumps([rep.to_dict() for rep in reports], indent=2)
