"""Hull-consistency contraction for a single inequality constraint.

One forward sweep evaluates every node of the expression tree with the
natural interval extension; the root is then intersected with the
feasible half-line of the relation, and one backward sweep projects
each node interval onto its children.  There is no internal fixpoint
iteration: callers that want more contraction call again.

The same machinery contracts with respect to f <= 0 or f >= 0, which
lets the solver run the negation of a constraint to identify regions
where the original is satisfied everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .interval import EMPTY, Box, Interval
from .expr import Binary, Const, Expression, Pow, Unary, VarKind, VarRef

__all__ = [
    "Relation",
    "InequalityConstraint",
    "hc4_revise",
    "backward_project",
]

_NONNEG = Interval(0.0, math.inf)
_NONPOS = Interval(-math.inf, 0.0)
_FULL = Interval(-math.inf, math.inf)


class Relation(Enum):
    LEQ = "<="  # f(x, y) <= 0
    GEQ = ">="  # f(x, y) >= 0


@dataclass(frozen=True, slots=True)
class InequalityConstraint:
    f: Expression
    relation: Relation = Relation.LEQ


def backward_project(
    op: str,
    node_interval: Interval,
    child_intervals: Sequence[Interval],
    exponent: int | None = None,
) -> tuple[Interval, ...]:
    """Project a node interval onto its children.

    Each returned interval is the corresponding child intersected with
    the inverse image of ``node_interval`` under the operation, given
    the other children.  An empty result means the constraint is
    infeasible over the current domains.  sin and cos project to the
    hull of their unbounded inverse images, i.e. they leave the child
    unchanged.
    """
    c = node_interval
    if op in ("add", "sub", "mul", "div"):
        l, r = child_intervals
        if op == "add":
            return l.intersect(c - r), r.intersect(c - l)
        if op == "sub":
            return l.intersect(c + r), r.intersect(l - c)
        if op == "mul":
            return l.intersect(c / r), r.intersect(c / l)
        return l.intersect(c * r), r.intersect(l / c)
    (child,) = child_intervals
    if op == "neg":
        return (child.intersect(-c),)
    if op == "sqrt":
        return (child.intersect(c.intersect(_NONNEG).sqr()),)
    if op == "exp":
        return (child.intersect(c.log()),)
    if op == "log":
        return (child.intersect(c.exp()),)
    if op in ("sin", "cos"):
        return (child,)
    if op in ("pow", "sqr"):
        n = 2 if op == "sqr" else exponent
        if n is None:
            raise ValueError("pow projection needs an exponent")
        if n == 0:
            # node is constantly 1; infeasible when 1 is excluded
            return (child if c.contains(1.0) else EMPTY,)
        if n == 1:
            return (child.intersect(c),)
        if n % 2 == 1:
            return (child.intersect(c.root_int(n)),)
        root = c.root_int(n)
        pos = child.intersect(root)
        neg = child.intersect(-root)
        return (pos.hull(neg),)
    raise ValueError(f"unknown operation {op!r}")


def hc4_revise(constraint: InequalityConstraint, x: Box, y: Box) -> tuple[Box, Box]:
    """Contract variable and parameter domains against one inequality.

    Returns boxes that contain every point of (x, y) satisfying the
    constraint; both are empty when no point does.  The result never
    grows: each output coordinate is a subset of its input.  Emptiness
    always shows in the variable part, which matters when y has no
    coordinates at all.
    """
    values: dict[int, Interval] = {}
    root = _forward(constraint.f, x, y, values)
    feasible = _NONPOS if constraint.relation is Relation.LEQ else _NONNEG
    root = root.intersect(feasible)
    if root.is_empty:
        return Box.empty(len(x)), Box.empty(len(y))
    vars_x = list(x.dims)
    vars_y = list(y.dims)
    if not _backward(constraint.f, root, values, vars_x, vars_y):
        return Box.empty(len(x)), Box.empty(len(y))
    return Box(tuple(vars_x)), Box(tuple(vars_y))


def _forward(e: Expression, x: Box, y: Box, values: dict[int, Interval]) -> Interval:
    cached = values.get(id(e))
    if cached is not None:
        return cached
    if isinstance(e, Const):
        v = Interval.point(e.value)
    elif isinstance(e, VarRef):
        box = x if e.kind is VarKind.VARIABLE else y
        v = box.dims[e.index]
    elif isinstance(e, Binary):
        l = _forward(e.left, x, y, values)
        r = _forward(e.right, x, y, values)
        if e.op == "add":
            v = l + r
        elif e.op == "sub":
            v = l - r
        elif e.op == "mul":
            v = l * r
        else:
            v = l / r
    elif isinstance(e, Unary):
        c = _forward(e.child, x, y, values)
        v = -c if e.op == "neg" else getattr(c, e.op)()
    elif isinstance(e, Pow):
        v = _forward(e.base, x, y, values).pow_int(e.exponent)
    else:
        raise TypeError(f"not an expression node: {e!r}")
    values[id(e)] = v
    return v


def _backward(
    e: Expression,
    narrowed: Interval,
    values: dict[int, Interval],
    vars_x: list[Interval],
    vars_y: list[Interval],
) -> bool:
    """Push a narrowed node interval down the tree; False on emptiness."""
    values[id(e)] = narrowed
    if isinstance(e, Const):
        return True
    if isinstance(e, VarRef):
        slots = vars_x if e.kind is VarKind.VARIABLE else vars_y
        new_dom = slots[e.index].intersect(narrowed)
        if new_dom.is_empty:
            return False
        slots[e.index] = new_dom
        return True
    if isinstance(e, Binary):
        children = (e.left, e.right)
        stored = tuple(values[id(ch)] for ch in children)
        projected = backward_project(e.op, narrowed, stored)
    elif isinstance(e, Unary):
        children = (e.child,)
        stored = (values[id(e.child)],)
        projected = backward_project(e.op, narrowed, stored)
    elif isinstance(e, Pow):
        children = (e.base,)
        stored = (values[id(e.base)],)
        projected = backward_project("pow", narrowed, stored, exponent=e.exponent)
    else:
        raise TypeError(f"not an expression node: {e!r}")
    for child, new_iv in zip(children, projected):
        if new_iv.is_empty:
            return False
        if not _backward(child, new_iv, values, vars_x, vars_y):
            return False
    return True
