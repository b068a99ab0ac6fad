"""Branch-and-prune computation of inner and boundary pavings.

Solves systems of the form: find all x in the variable box such that
for every y in the parameter box every constraint f_i(x, y) <= 0 holds.
Each constraint carries its own copy of the parameter domain, so the
domains can shrink or split independently as the search proceeds.

A node is (box, store).  Processing a node optionally pins parameters
proven monotone (2B+ mode), prunes the box with each constraint
instantiated at its parameter midpoint, identifies an inner region by
contracting the negated constraints, then bisects parameter domains and
branches on the widest variable coordinate.  Volumes are tracked as
exact rationals, which makes the classified-volume ratio monotone and
exactly 1.0 on complete runs.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .interval import Box, Interval
from .expr import Expression, VarKind, VarRef, derivative_interval
from .contractor import InequalityConstraint, Relation, hc4_revise

__all__ = [
    "Problem",
    "QuantifiedConstraint",
    "SolverConfig",
    "SolveStats",
    "Paving",
    "parameter_instantiation",
    "local_pruning",
    "global_pruning",
    "solution_identification",
    "parameter_domain_bisection",
    "branch",
    "solve",
    "classified_ratio",
]


@dataclass(frozen=True, slots=True)
class Problem:
    """A quantified system: constraints are read as f(x, y) <= 0 for all y."""

    variable_names: tuple[str, ...]
    variable_box: Box
    parameter_names: tuple[str, ...]
    parameter_box: Box
    constraints: tuple[Expression, ...]
    name: str = "problem"

    def __post_init__(self) -> None:
        if len(self.variable_names) != len(self.variable_box):
            raise ValueError("variable names and box dimensions differ")
        if len(self.parameter_names) != len(self.parameter_box):
            raise ValueError("parameter names and box dimensions differ")
        if not self.variable_names:
            raise ValueError("at least one variable is required")
        if not self.constraints:
            raise ValueError("at least one constraint is required")
        for name, iv in zip(
            self.variable_names + self.parameter_names,
            self.variable_box.dims + self.parameter_box.dims,
        ):
            if iv.is_empty:
                raise ValueError(f"empty domain for {name}")
            if math.isinf(iv.lo) or math.isinf(iv.hi):
                raise ValueError(f"unbounded domain for {name}")


@dataclass(frozen=True, slots=True)
class QuantifiedConstraint:
    """One constraint f <= 0 with its private copy of the parameter domain."""

    f: Expression
    param_domain: Box
    source: int = 0


@dataclass
class SolverConfig:
    epsilon: float = 1e-3
    stop_ratio: float | None = None
    mode: str = "2b+"
    param_bisect: bool = True
    max_param_splits: int = 1
    max_nodes: int | None = None
    time_limit: float | None = None

    def __post_init__(self) -> None:
        self.mode = self.mode.lower()
        if self.mode not in ("2b", "2b+"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not (self.epsilon > 0.0 and math.isfinite(self.epsilon)):
            raise ValueError("epsilon must be positive and finite")
        if self.stop_ratio is not None and not 0.0 < self.stop_ratio <= 1.0:
            raise ValueError("stop ratio must lie in (0, 1]")
        if self.max_param_splits < 0:
            raise ValueError("max_param_splits must be >= 0")
        if self.max_nodes is not None and self.max_nodes < 1:
            raise ValueError("max_nodes must be >= 1")
        if self.time_limit is not None and self.time_limit <= 0.0:
            raise ValueError("time_limit must be positive")


@dataclass
class SolveStats:
    """Run statistics; the exact_* fields are the rational volume ledger."""

    nodes_processed: int = 0
    volume_initial: float = 0.0
    volume_inner: float = 0.0
    volume_boundary: float = 0.0
    volume_queued: float = 0.0
    elapsed: float = 0.0
    stop_reason: str = "complete"
    exact_initial: Fraction = Fraction(0)
    exact_inner: Fraction = Fraction(0)
    exact_boundary: Fraction = Fraction(0)
    exact_queued: Fraction = Fraction(0)

    def sync(self) -> None:
        self.volume_initial = float(self.exact_initial)
        self.volume_inner = float(self.exact_inner)
        self.volume_boundary = float(self.exact_boundary)
        self.volume_queued = float(self.exact_queued)


@dataclass
class Paving:
    """Solver output: proven-inner boxes, undecided boundary boxes, stats."""

    inner: list[Box]
    boundary: list[Box]
    stats: SolveStats
    initial_box: Box


def classified_ratio(paving: Paving) -> float:
    """Fraction of the initial volume classified inner or rejected.

    Equivalently 1 minus the unclassified (boundary plus still-queued)
    fraction.  Computed on the exact rational ledger, so it is monotone
    over a run and exactly 1.0 once the queue drains with nothing left
    unclassified.
    """
    s = paving.stats
    if s.exact_initial <= 0:
        raise ValueError("classified ratio needs a positive initial volume")
    rejected = s.exact_initial - s.exact_inner - s.exact_boundary - s.exact_queued
    return float((s.exact_inner + rejected) / s.exact_initial)


def _widest_axis(box: Box) -> int:
    best = 0
    for i in range(1, len(box)):
        if box.dims[i].width > box.dims[best].width:
            best = i
    return best


def parameter_instantiation(
    store: Sequence[QuantifiedConstraint], box: Box
) -> list[QuantifiedConstraint]:
    """Pin parameter coordinates proven monotone over box x domain.

    If df/dy_j is non-negative everywhere, the constraint is hardest at
    the upper endpoint, so the domain coordinate collapses to it (lower
    endpoint for non-positive).  Derivative enclosures that are empty or
    not finite leave the coordinate unchanged.  Pinning goes coordinate
    by coordinate, each step seeing the domains already pinned.
    """
    out: list[QuantifiedConstraint] = []
    for qc in store:
        dims = list(qc.param_domain.dims)
        changed = False
        for j, iv in enumerate(dims):
            if iv.is_degenerate:
                continue
            d = derivative_interval(
                qc.f, VarRef(VarKind.PARAMETER, j), box, Box(tuple(dims))
            )
            if d.is_empty or math.isinf(d.lo) or math.isinf(d.hi):
                continue
            if d.lo >= 0.0 and math.isfinite(iv.hi):
                dims[j] = Interval.point(iv.hi)
                changed = True
            elif d.hi <= 0.0 and math.isfinite(iv.lo):
                dims[j] = Interval.point(iv.lo)
                changed = True
        if changed:
            out.append(QuantifiedConstraint(qc.f, Box(tuple(dims)), qc.source))
        else:
            out.append(qc)
    return out


def local_pruning(qc: QuantifiedConstraint, box: Box) -> Box:
    """Contract box against f(x, mid(domain)) <= 0.

    Sound because a solution must satisfy the constraint at every
    parameter point, the midpoint included.  With no parameters the
    midpoint is the empty tuple and the constraint is contracted as is.
    """
    y_mid = Box.point(qc.param_domain.midpoint)
    contracted, _ = hc4_revise(InequalityConstraint(qc.f, Relation.LEQ), box, y_mid)
    return contracted


def global_pruning(store: Sequence[QuantifiedConstraint], box: Box) -> Box:
    """Sequential local pruning over the whole store; empty means rejected."""
    cur = box
    for qc in store:
        cur = local_pruning(qc, cur)
        if cur.is_empty:
            return cur
    return cur


def solution_identification(
    store: Sequence[QuantifiedConstraint], box: Box
) -> tuple[list[QuantifiedConstraint], Box, list[Box]]:
    """Split off the part of box proven to satisfy every constraint.

    Contracts box against each negation f >= 0: points outside the
    contracted region satisfy that constraint for every parameter value
    in its domain.  Returns the surviving store (dropped constraints
    held everywhere; kept ones get their contracted parameter domain,
    reusable for the whole subtree), the hull of the negation regions,
    and the closure of box minus that hull as inner boxes.
    """
    kept: list[QuantifiedConstraint] = []
    remainder = Box.empty(len(box))
    for qc in store:
        xi, yi = hc4_revise(
            InequalityConstraint(qc.f, Relation.GEQ), box, qc.param_domain
        )
        if xi.is_empty:
            continue
        kept.append(QuantifiedConstraint(qc.f, yi, qc.source))
        remainder = remainder.hull(xi)
    return kept, remainder, box.set_difference_closure(remainder)


def parameter_domain_bisection(
    store: Sequence[QuantifiedConstraint], epsilon: float, max_splits: int = 1
) -> list[QuantifiedConstraint]:
    """Split each constraint along its widest parameter coordinate.

    A constraint whose widest coordinate is at most epsilon wide stays
    whole; otherwise it is replaced by two copies per split, up to
    max_splits rounds, lower half first.
    """
    out: list[QuantifiedConstraint] = []
    for qc in store:
        out.extend(_split(qc, epsilon, max_splits))
    return out


def _split(
    qc: QuantifiedConstraint, epsilon: float, budget: int
) -> list[QuantifiedConstraint]:
    dom = qc.param_domain
    if budget <= 0 or len(dom) == 0:
        return [qc]
    axis = _widest_axis(dom)
    if dom.dims[axis].width <= epsilon:
        return [qc]
    lo_half, hi_half = dom.bisect(axis)
    return _split(QuantifiedConstraint(qc.f, lo_half, qc.source), epsilon, budget - 1) + _split(
        QuantifiedConstraint(qc.f, hi_half, qc.source), epsilon, budget - 1
    )


def branch(box: Box) -> tuple[Box, Box]:
    """Bisect the widest variable coordinate, lowest index on ties."""
    return box.bisect(_widest_axis(box))


def solve(
    problem: Problem,
    config: SolverConfig | None = None,
    progress: Callable[[Paving], None] | None = None,
) -> Paving:
    """Run branch-and-prune until the queue drains or a limit triggers.

    The queue is ordered by descending box width with FIFO tie-breaking,
    so runs are deterministic.  On an early stop (ratio, node or time
    limit) the remaining queue is flushed into the boundary list and the
    stop reason is recorded in the stats.  ``progress`` is invoked with
    the live paving after each processed node.
    """
    cfg = config if config is not None else SolverConfig()
    stats = SolveStats()
    stats.exact_initial = problem.variable_box.exact_volume()
    paving = Paving([], [], stats, problem.variable_box)
    root_store = tuple(
        QuantifiedConstraint(f, problem.parameter_box, i)
        for i, f in enumerate(problem.constraints)
    )

    heap: list[tuple[float, int, Box, tuple[QuantifiedConstraint, ...]]] = []
    seq = 0

    def push(box: Box, store: tuple[QuantifiedConstraint, ...]) -> None:
        nonlocal seq
        heapq.heappush(heap, (-box.width, seq, box, store))
        stats.exact_queued += box.exact_volume()
        seq += 1

    push(problem.variable_box, root_store)
    t0 = time.perf_counter()
    stop = "complete"
    while heap:
        if (
            cfg.stop_ratio is not None
            and stats.exact_initial > 0
            and classified_ratio(paving) >= cfg.stop_ratio
        ):
            stop = "ratio"
            break
        if cfg.max_nodes is not None and stats.nodes_processed >= cfg.max_nodes:
            stop = "nodes"
            break
        if cfg.time_limit is not None and time.perf_counter() - t0 > cfg.time_limit:
            stop = "time"
            break
        _, _, box, store = heapq.heappop(heap)
        stats.exact_queued -= box.exact_volume()
        stats.nodes_processed += 1
        if box.width <= cfg.epsilon:
            paving.boundary.append(box)
            stats.exact_boundary += box.exact_volume()
        else:
            if cfg.mode == "2b+":
                store = tuple(parameter_instantiation(store, box))
            pruned = global_pruning(store, box)
            if not pruned.is_empty:
                kept, remainder, inner_pieces = solution_identification(store, pruned)
                for piece in inner_pieces:
                    paving.inner.append(piece)
                    stats.exact_inner += piece.exact_volume()
                # A remainder left degenerate inside the box sits on the face
                # of an emitted inner piece; its closure is already covered,
                # so exploring it further would only mint boundary boxes.
                if not remainder.is_empty and not any(
                    piece.contains_box(remainder) for piece in inner_pieces
                ):
                    if cfg.param_bisect:
                        kept = parameter_domain_bisection(
                            kept, cfg.epsilon, cfg.max_param_splits
                        )
                    kept_t = tuple(kept)
                    if remainder.width > cfg.epsilon:
                        left, right = branch(remainder)
                        push(left, kept_t)
                        push(right, kept_t)
                    else:
                        push(remainder, kept_t)
        stats.sync()
        if progress is not None:
            stats.elapsed = time.perf_counter() - t0
            progress(paving)
    while heap:
        _, _, box, _ = heapq.heappop(heap)
        stats.exact_queued -= box.exact_volume()
        paving.boundary.append(box)
        stats.exact_boundary += box.exact_volume()
    stats.stop_reason = stop
    stats.sync()
    stats.elapsed = time.perf_counter() - t0
    return paving
