"""Indicator weighting: AHP eigenvector weights, consistency checks, expert-scoring
weights, their product combination, and composition down the indicator hierarchy.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    ConvergenceError,
    DegenerateDataError,
    IncompleteWeightsError,
    InvalidInputError,
    UnsupportedOrderError,
)
from .model import IndicatorNode, IndicatorTree, WEIGHT_SUM_TOL

RECIPROCAL_TOL = 1e-9
POWER_TOL = 1e-12
POWER_MAX_ITER = 10_000
MAX_MATRIX_ORDER = 15

# Random consistency index by matrix order (Saaty's table).
RANDOM_INDEX: dict[int, float] = {
    3: 0.58, 4: 0.90, 5: 1.12, 6: 1.24, 7: 1.32, 8: 1.41, 9: 1.45,
}

CR_THRESHOLD = 0.1


@dataclass(frozen=True)
class PairwiseMatrix:
    """A reciprocal pairwise-comparison matrix over sibling indicators."""

    ids: tuple[str, ...]
    entries: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        ids = tuple(self.ids)
        object.__setattr__(self, "ids", ids)
        n = len(ids)
        if len(set(ids)) != n:
            raise InvalidInputError("pairwise matrix ids must be unique")
        rows = tuple(tuple(float(v) for v in row) for row in self.entries)
        if len(rows) != n or any(len(row) != n for row in rows):
            raise InvalidInputError(f"pairwise matrix must be {n}x{n}")
        for i in range(n):
            if abs(rows[i][i] - 1.0) > RECIPROCAL_TOL:
                raise InvalidInputError(f"diagonal entry ({ids[i]},{ids[i]}) must be 1, got {rows[i][i]!r}")
            for j in range(n):
                v = rows[i][j]
                if not (np.isfinite(v) and 1 / 9 - 1e-12 <= v <= 9 + 1e-12):
                    raise InvalidInputError(
                        f"entry ({ids[i]},{ids[j]}) = {v!r} outside [1/9, 9]"
                    )
                if abs(rows[i][j] * rows[j][i] - 1.0) > RECIPROCAL_TOL:
                    raise InvalidInputError(
                        f"entries ({ids[i]},{ids[j]}) and ({ids[j]},{ids[i]}) are not reciprocal"
                    )
        object.__setattr__(self, "entries", rows)

    @property
    def n(self) -> int:
        return len(self.ids)

    def array(self) -> np.ndarray:
        return np.asarray(self.entries, dtype=float)


@dataclass(frozen=True)
class GroupConsistency:
    """Consistency diagnostics for one sibling group's pairwise matrix."""

    parent_id: str | None  # None = the dimension (root) group
    n: int
    lambda_max: float
    ci: float
    cr: float
    acceptable: bool


@dataclass(frozen=True)
class WeightTable:
    """Local and composed global weights over a tree's core (non-bonus) nodes."""

    local_weights: Mapping[str, float]
    global_weights: Mapping[str, float]
    consistency: tuple[GroupConsistency, ...] = ()


def principal_weights(matrix: PairwiseMatrix) -> tuple[tuple[float, ...], float]:
    """Normalized principal eigenvector and lambda_max of a pairwise matrix.

    Power iteration on the positive matrix, declared converged when two
    successive normalized iterates differ by less than 1e-12 in max-norm;
    lambda_max is the Rayleigh quotient at the converged vector.
    """
    n = matrix.n
    if n < 2:
        raise InvalidInputError(f"need a matrix of order >= 2, got {n}")
    if n > MAX_MATRIX_ORDER:
        raise UnsupportedOrderError(f"matrix order {n} exceeds supported maximum {MAX_MATRIX_ORDER}")
    a = matrix.array()
    w = np.full(n, 1.0 / n)
    for _ in range(POWER_MAX_ITER):
        v = a @ w
        w_next = v / v.sum()
        if float(np.max(np.abs(w_next - w))) < POWER_TOL:
            w = w_next
            break
        w = w_next
    else:
        raise ConvergenceError(
            f"power iteration did not converge within {POWER_MAX_ITER} iterations"
        )
    lambda_max = float(w @ a @ w) / float(w @ w)
    return tuple(float(x) for x in w), lambda_max


def consistency_ratio(lambda_max: float, n: int) -> tuple[float, float]:
    """(CI, CR) for a matrix of order n; CR = 0 for n <= 2 by construction."""
    if n < 2:
        raise InvalidInputError(f"matrix order must be >= 2, got {n}")
    if lambda_max < n - 1e-9:
        raise InvalidInputError(f"lambda_max {lambda_max!r} below matrix order {n}")
    ci = (lambda_max - n) / (n - 1)
    if n <= 2:
        return ci, 0.0
    ri = RANDOM_INDEX.get(n)
    if ri is None:
        raise UnsupportedOrderError(f"no random-index entry for matrix order {n}")
    return ci, ci / ri


def is_acceptable(cr: float) -> bool:
    return cr < CR_THRESHOLD


def importance_weights(means: Sequence[float]) -> tuple[float, ...]:
    """Expert-scoring weights: importance means normalized to sum 1."""
    if not means:
        raise InvalidInputError("no importance means given")
    if any(m <= 0 for m in means):
        raise InvalidInputError("importance means must all be positive")
    total = float(sum(means))
    return tuple(float(m) / total for m in means)


def combine_weights(
    w_scoring: Sequence[float], w_ahp: Sequence[float]
) -> tuple[float, ...]:
    """Product combination: c_i = scoring_i * ahp_i, renormalized to sum 1."""
    if len(w_scoring) != len(w_ahp):
        raise InvalidInputError(
            f"weight vectors differ in length: {len(w_scoring)} vs {len(w_ahp)}"
        )
    if any(w < 0 for w in w_scoring) or any(w < 0 for w in w_ahp):
        raise InvalidInputError("weights must be non-negative")
    products = [float(a) * float(b) for a, b in zip(w_scoring, w_ahp)]
    total = sum(products)
    if total == 0:
        raise DegenerateDataError("all pairwise products are zero; combined weights undefined")
    return tuple(p / total for p in products)


def compose_global(tree: IndicatorTree) -> WeightTable:
    """Compose each core node's global weight as the product of local weights
    along its path from the dimension root.

    Every core (non-bonus) node must carry a local weight and every core
    sibling group must sum to 1; bonus subtrees are ignored entirely.
    """
    local: dict[str, float] = {}
    for node in tree.nodes:
        if node.bonus:
            continue
        if node.local_weight is None:
            raise IncompleteWeightsError(f"node {node.id} has no local weight")
        local[node.id] = node.local_weight

    for parent_id, members in tree.sibling_groups():
        core = [n for n in members if not n.bonus]
        if not core:
            continue
        total = sum(local[n.id] for n in core)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            where = "root dimensions" if parent_id is None else f"children of {parent_id}"
            raise InvalidInputError(f"local weights of {where} sum to {total!r}, expected 1")

    global_w: dict[str, float] = {}
    for node in tree.nodes:  # sorted by id; parents may come after children, so recurse
        if node.bonus:
            continue
        global_w[node.id] = _global_of(tree, node, local, global_w)
    return WeightTable(local_weights=local, global_weights=global_w)


def _global_of(
    tree: IndicatorTree,
    node: IndicatorNode,
    local: Mapping[str, float],
    cache: dict[str, float],
) -> float:
    if node.id in cache:
        return cache[node.id]
    if node.id not in local:
        # only reachable on malformed trees (core node under a bonus ancestor)
        raise IncompleteWeightsError(f"node {node.id} has no local weight")
    if node.parent_id is None:
        value = local[node.id]
    else:
        value = local[node.id] * _global_of(tree, tree.node(node.parent_id), local, cache)
    cache[node.id] = value
    return value


def weight_tree(
    tree: IndicatorTree,
    *,
    pairwise: Mapping[str | None, PairwiseMatrix] | None = None,
    importance: Mapping[str, float] | None = None,
    method: str = "combined",
) -> tuple[IndicatorTree, WeightTable]:
    """Derive local weights for every core sibling group and compose globals.

    ``pairwise`` maps a parent node id (None for the dimension group) to that
    group's comparison matrix; ``importance`` maps node ids to their mean
    importance scores. Method "ahp" uses matrices only, "scoring" uses
    importance means only, and "combined" multiplies the two where both exist
    and falls back to whichever source covers a group.
    """
    if method not in ("ahp", "scoring", "combined"):
        raise InvalidInputError(f"unknown weighting method {method!r}")
    pairwise = dict(pairwise or {})
    importance = dict(importance or {})

    assigned: dict[str, float] = {}
    diagnostics: list[GroupConsistency] = []
    for parent_id, members in tree.sibling_groups():
        core = [n for n in members if not n.bonus]
        if not core:
            continue
        member_ids = [n.id for n in core]
        if len(core) == 1:
            assigned[member_ids[0]] = 1.0
            continue

        ahp_w: dict[str, float] | None = None
        matrix = pairwise.get(parent_id)
        if matrix is not None:
            if set(matrix.ids) != set(member_ids):
                group = "the dimension group" if parent_id is None else f"children of {parent_id}"
                raise InvalidInputError(
                    f"pairwise matrix ids {sorted(matrix.ids)} do not match {group} {sorted(member_ids)}"
                )
            weights, lambda_max = principal_weights(matrix)
            ci, cr = consistency_ratio(lambda_max, matrix.n)
            diagnostics.append(GroupConsistency(
                parent_id=parent_id, n=matrix.n, lambda_max=lambda_max,
                ci=ci, cr=cr, acceptable=is_acceptable(cr),
            ))
            ahp_w = dict(zip(matrix.ids, weights))

        scoring_w: dict[str, float] | None = None
        if all(mid in importance for mid in member_ids):
            weights = importance_weights([importance[mid] for mid in member_ids])
            scoring_w = dict(zip(member_ids, weights))

        chosen: dict[str, float]
        if method == "ahp":
            if ahp_w is None:
                raise IncompleteWeightsError(_missing(parent_id, "pairwise matrix"))
            chosen = ahp_w
        elif method == "scoring":
            if scoring_w is None:
                raise IncompleteWeightsError(_missing(parent_id, "importance means"))
            chosen = scoring_w
        else:
            if ahp_w is not None and scoring_w is not None:
                combined = combine_weights(
                    [scoring_w[mid] for mid in member_ids],
                    [ahp_w[mid] for mid in member_ids],
                )
                chosen = dict(zip(member_ids, combined))
            elif ahp_w is not None:
                chosen = ahp_w
            elif scoring_w is not None:
                chosen = scoring_w
            else:
                raise IncompleteWeightsError(
                    _missing(parent_id, "pairwise matrix or importance means")
                )
        assigned.update(chosen)

    weighted_nodes = []
    for node in tree.nodes:
        if node.id in assigned:
            weighted_nodes.append(node.replace_weights(local=assigned[node.id]))
        else:
            weighted_nodes.append(node)
    weighted = IndicatorTree(nodes=tuple(weighted_nodes))
    table = replace(compose_global(weighted), consistency=tuple(diagnostics))

    final_nodes = []
    for node in weighted.nodes:
        g = table.global_weights.get(node.id)
        final_nodes.append(node if g is None else node.replace_weights(global_=g))
    return IndicatorTree(nodes=tuple(final_nodes)), table


def _missing(parent_id: str | None, what: str) -> str:
    group = "the dimension group" if parent_id is None else f"children of {parent_id}"
    return f"no {what} for {group}"
