"""Domain types for the STAGE instrument workflow.

Everything here is immutable after construction: dataclasses are frozen and
collection fields are normalized to tuples at construction time, so instances
can be shared freely across threads. Validation that should never abort a
workflow (tree well-formedness) is report-style via :func:`validate_tree`;
per-value range checks raise :class:`~stagekit.errors.InvalidInputError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

from .errors import InvalidInputError

WEIGHT_SUM_TOL = 1e-9

# Consumer questionnaire response coding: 0 = "Strongly Disagree" .. 4 = "Strongly Agree".
RESPONSE_MIN = 0
RESPONSE_MAX = 4


class Level(str, Enum):
    """Hierarchy level of an indicator node."""

    DIMENSION = "dimension"
    INDEX = "index"
    ITEM = "item"


class IdentityGroup(str, Enum):
    """The five expert panel identity groups."""

    SERVICE_DECISION_MAKER = "service_decision_maker"
    TECHNOLOGY_RND = "technology_rnd"
    SOCIAL_TECHNOLOGY_RESEARCHER = "social_technology_researcher"
    TECHNOLOGY_IMPLEMENTER = "technology_implementer"
    OTHER = "other"


class Familiarity(str, Enum):
    """Expert self-rated familiarity with the subject."""

    VERY_FAMILIAR = "very_familiar"
    FAMILIAR = "familiar"
    MODERATE = "moderate"
    UNFAMILIAR = "unfamiliar"
    VERY_UNFAMILIAR = "very_unfamiliar"


class JudgmentBasis(str, Enum):
    """What an expert's judgment rests on."""

    THEORETICAL_ANALYSIS = "theoretical_analysis"
    PRACTICAL_EXPERIENCE = "practical_experience"
    PEER_REFERENCE = "peer_reference"
    INTUITION = "intuition"


class Impact(str, Enum):
    """Self-rated impact of one judgment basis on the expert's ratings."""

    LARGE = "large"
    MEDIUM = "medium"
    SMALL = "small"


@dataclass(frozen=True)
class IndicatorNode:
    """One node of the indicator hierarchy.

    ``bonus`` marks supplementary indicators that sit outside the core
    dimensions and are excluded from weight normalization.
    """

    id: str
    name: str
    level: Level
    parent_id: str | None = None
    local_weight: float | None = None
    global_weight: float | None = None
    bonus: bool = False

    def __post_init__(self):
        if not self.id:
            raise InvalidInputError("indicator id must be non-empty")
        for label, w in (("local_weight", self.local_weight), ("global_weight", self.global_weight)):
            if w is not None and not (math.isfinite(w) and 0.0 <= w <= 1.0):
                raise InvalidInputError(f"node {self.id}: {label} {w!r} outside [0, 1]")

    def replace_weights(self, local: float | None = None, global_: float | None = None) -> "IndicatorNode":
        return IndicatorNode(
            id=self.id,
            name=self.name,
            level=self.level,
            parent_id=self.parent_id,
            local_weight=self.local_weight if local is None else local,
            global_weight=self.global_weight if global_ is None else global_,
            bonus=self.bonus,
        )


@dataclass(frozen=True)
class IndicatorTree:
    """An indicator hierarchy, normalized to a deterministic order by id."""

    nodes: tuple[IndicatorNode, ...]

    def __post_init__(self):
        ordered = tuple(sorted(self.nodes, key=lambda n: n.id))
        object.__setattr__(self, "nodes", ordered)
        object.__setattr__(self, "_by_id", {n.id: n for n in ordered})

    def node(self, node_id: str) -> IndicatorNode | None:
        return self._by_id.get(node_id)

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._by_id

    def __len__(self) -> int:
        return len(self.nodes)

    def children(self, parent_id: str | None) -> tuple[IndicatorNode, ...]:
        return tuple(n for n in self.nodes if n.parent_id == parent_id)

    def roots(self) -> tuple[IndicatorNode, ...]:
        return self.children(None)

    def leaves(self) -> tuple[IndicatorNode, ...]:
        with_children = {n.parent_id for n in self.nodes if n.parent_id is not None}
        return tuple(n for n in self.nodes if n.id not in with_children)

    def sibling_groups(self) -> tuple[tuple[str | None, tuple[IndicatorNode, ...]], ...]:
        """All (parent_id, children) groups, the root group first."""
        parents: list[str | None] = [None]
        parents.extend(n.id for n in self.nodes)
        groups = []
        for pid in parents:
            members = self.children(pid)
            if members:
                groups.append((pid, members))
        return tuple(groups)

    def path_to_root(self, node_id: str) -> tuple[IndicatorNode, ...]:
        """Node and its ancestors, root last. Stops on a missing parent."""
        chain: list[IndicatorNode] = []
        current = self.node(node_id)
        seen: set[str] = set()
        while current is not None and current.id not in seen:
            chain.append(current)
            seen.add(current.id)
            current = self.node(current.parent_id) if current.parent_id else None
        return tuple(chain)


_CHILD_LEVEL = {Level.INDEX: Level.DIMENSION, Level.ITEM: Level.INDEX}


def validate_tree(tree: IndicatorTree) -> list[str]:
    """Report every structural invariant the tree violates.

    Returns an empty list iff the tree is well-formed. An empty tree is
    vacuously valid. Checks, in order: id uniqueness, level/parent rules,
    bonus-subtree consistency, and sibling-group local-weight sums (only for
    non-bonus groups whose weights are all set).
    """
    problems: list[str] = []

    seen: set[str] = set()
    for node in tree.nodes:
        if node.id in seen:
            problems.append(f"duplicate node id {node.id!r}")
        seen.add(node.id)

    for node in tree.nodes:
        if node.level is Level.DIMENSION:
            if node.parent_id is not None:
                problems.append(f"node {node.id}: dimension nodes must have no parent")
            continue
        required = _CHILD_LEVEL[node.level]
        if node.parent_id is None:
            problems.append(f"node {node.id}: {node.level.value} node has no parent")
            continue
        parent = tree.node(node.parent_id)
        if parent is None:
            problems.append(f"node {node.id}: parent {node.parent_id!r} does not exist")
        elif parent.level is not required:
            problems.append(
                f"node {node.id}: {node.level.value} parent must be a {required.value} "
                f"(got {parent.level.value})"
            )

    for node in tree.nodes:
        parent = tree.node(node.parent_id) if node.parent_id else None
        if parent is None:
            continue
        if node.bonus and not parent.bonus:
            problems.append(f"node {node.id}: bonus node inside a non-bonus (core) subtree")
        if not node.bonus and parent.bonus:
            problems.append(f"node {node.id}: non-bonus node inside a bonus subtree")

    for parent_id, members in tree.sibling_groups():
        core = [n for n in members if not n.bonus]
        if not core or any(n.local_weight is None for n in core):
            continue
        total = sum(n.local_weight for n in core)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            where = "root dimensions" if parent_id is None else f"children of {parent_id}"
            problems.append(f"local weights of {where} sum to {total!r}, expected 1")

    return problems


@dataclass(frozen=True)
class ExpertProfile:
    """One panel expert: identity group plus the self-assessment inputs."""

    id: str
    identity_group: IdentityGroup
    familiarity: Familiarity
    judgment_basis: Mapping[JudgmentBasis, Impact]

    def __post_init__(self):
        basis = dict(self.judgment_basis)
        missing = [b.value for b in JudgmentBasis if b not in basis]
        if missing or len(basis) != len(JudgmentBasis):
            extra = sorted(str(k) for k in basis if k not in set(JudgmentBasis))
            detail = []
            if missing:
                detail.append(f"missing bases: {', '.join(missing)}")
            if extra:
                detail.append(f"unknown bases: {', '.join(extra)}")
            raise InvalidInputError(f"expert {self.id}: judgment_basis must cover all four bases exactly once"
                                    + (f" ({'; '.join(detail)})" if detail else ""))
        object.__setattr__(self, "judgment_basis", basis)


@dataclass(frozen=True)
class RatingRound:
    """One Delphi consultation round.

    ``ratings`` holds one complete row per responding expert; experts who did
    not return a usable questionnaire appear in ``non_respondents`` and count
    toward ``distributed`` only.
    """

    round_no: int
    scale_max: int
    distributed: int
    indicator_ids: tuple[str, ...]
    ratings: Mapping[str, tuple[int, ...]]
    non_respondents: tuple[str, ...] = ()

    def __post_init__(self):
        if self.round_no < 1:
            raise InvalidInputError(f"round_no must be positive, got {self.round_no}")
        if self.scale_max < 1:
            raise InvalidInputError(f"scale_max must be positive, got {self.scale_max}")
        ids = tuple(self.indicator_ids)
        if len(set(ids)) != len(ids):
            raise InvalidInputError("indicator ids must be unique")
        object.__setattr__(self, "indicator_ids", ids)
        object.__setattr__(self, "non_respondents", tuple(self.non_respondents))
        rows = {}
        for expert_id, row in dict(self.ratings).items():
            row = tuple(row)
            if len(row) != len(ids):
                raise InvalidInputError(
                    f"expert {expert_id}: {len(row)} ratings for {len(ids)} indicators"
                )
            for ind_id, value in zip(ids, row):
                if not isinstance(value, int) or not 1 <= value <= self.scale_max:
                    raise InvalidInputError(
                        f"expert {expert_id}, indicator {ind_id}: rating {value!r} "
                        f"outside [1, {self.scale_max}]"
                    )
            rows[expert_id] = row
        if self.distributed < len(rows):
            raise InvalidInputError(
                f"{len(rows)} responding experts exceed {self.distributed} distributed questionnaires"
            )
        object.__setattr__(self, "ratings", rows)

    @property
    def returned(self) -> int:
        return len(self.ratings)

    def column(self, indicator_id: str) -> tuple[int, ...]:
        try:
            idx = self.indicator_ids.index(indicator_id)
        except ValueError:
            raise InvalidInputError(f"unknown indicator {indicator_id!r}") from None
        return tuple(row[idx] for row in self.ratings.values())

    def matrix(self) -> list[list[int]]:
        """Raters-by-indicators matrix in expert insertion order."""
        return [list(row) for row in self.ratings.values()]


@dataclass(frozen=True)
class ScreeningThresholds:
    """Retention cutoffs for one round's indicator screening."""

    mean_floor: float
    fsf_floor: float
    cv_ceiling: float

    def __post_init__(self):
        for label, v in (("mean_floor", self.mean_floor), ("fsf_floor", self.fsf_floor),
                         ("cv_ceiling", self.cv_ceiling)):
            if not math.isfinite(v):
                raise InvalidInputError(f"{label} must be finite, got {v!r}")
        if not 0.0 <= self.fsf_floor <= 1.0:
            raise InvalidInputError(f"fsf_floor {self.fsf_floor!r} outside [0, 1]")
        if self.cv_ceiling < 0:
            raise InvalidInputError(f"cv_ceiling {self.cv_ceiling!r} must be non-negative")


@dataclass(frozen=True)
class Question:
    """One questionnaire question with its response range."""

    id: str
    text: str
    min_value: int = RESPONSE_MIN
    max_value: int = RESPONSE_MAX


@dataclass(frozen=True)
class Instrument:
    """A questionnaire definition: indices, their questions, and bonus indicators.

    ``indices`` keeps the presentation order; every question belongs to
    exactly one index, and every index maps to one dimension.
    """

    name: str
    indices: tuple[tuple[str, tuple[str, ...]], ...]
    questions: tuple[Question, ...]
    dimension_of: Mapping[str, str]
    dimension_names: Mapping[str, str]
    index_names: Mapping[str, str]
    aliases: Mapping[str, str] = field(default_factory=dict)
    bonus_indicators: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "indices",
                           tuple((idx, tuple(qids)) for idx, qids in self.indices))
        object.__setattr__(self, "questions", tuple(self.questions))
        object.__setattr__(self, "dimension_of", dict(self.dimension_of))
        object.__setattr__(self, "dimension_names", dict(self.dimension_names))
        object.__setattr__(self, "index_names", dict(self.index_names))
        object.__setattr__(self, "aliases", dict(self.aliases))
        object.__setattr__(self, "bonus_indicators",
                           tuple((bid, bname) for bid, bname in self.bonus_indicators))

        owner: dict[str, str] = {}
        for index_id, qids in self.indices:
            if index_id not in self.dimension_of:
                raise InvalidInputError(f"index {index_id}: no dimension assigned")
            for qid in qids:
                if qid in owner:
                    raise InvalidInputError(f"question {qid} assigned to both {owner[qid]} and {index_id}")
                owner[qid] = index_id
        known = {q.id for q in self.questions}
        if len(known) != len(self.questions):
            raise InvalidInputError("duplicate question ids")
        unassigned = known - set(owner)
        unknown = set(owner) - known
        if unassigned:
            raise InvalidInputError(f"questions not assigned to any index: {sorted(unassigned)}")
        if unknown:
            raise InvalidInputError(f"indices reference undefined questions: {sorted(unknown)}")
        object.__setattr__(self, "_index_of", owner)

    @property
    def question_ids(self) -> tuple[str, ...]:
        return tuple(q.id for q in self.questions)

    def index_of(self, question_id: str) -> str:
        try:
            return self._index_of[question_id]
        except KeyError:
            raise InvalidInputError(f"unknown question {question_id!r}") from None

    def questions_of(self, index_id: str) -> tuple[str, ...]:
        for idx, qids in self.indices:
            if idx == index_id:
                return qids
        raise InvalidInputError(f"unknown index {index_id!r}")

    def dimensions(self) -> tuple[str, ...]:
        """Dimension ids in first-appearance order."""
        out: list[str] = []
        for index_id, _ in self.indices:
            dim = self.dimension_of[index_id]
            if dim not in out:
                out.append(dim)
        return tuple(out)

    def indices_of_dimension(self, dimension_id: str) -> tuple[str, ...]:
        return tuple(idx for idx, _ in self.indices if self.dimension_of[idx] == dimension_id)

    @property
    def bonus_ids(self) -> tuple[str, ...]:
        return tuple(bid for bid, _ in self.bonus_indicators)


@dataclass(frozen=True)
class ResponseSet:
    """Collected answers: consumer questionnaire rows plus expert bonus ratings.

    Consumer cells may be ``None`` (missing answer); bonus cells may not.
    """

    question_ids: tuple[str, ...]
    consumer: Mapping[str, tuple[int | None, ...]]
    bonus_ids: tuple[str, ...] = ()
    expert_bonus: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        qids = tuple(self.question_ids)
        object.__setattr__(self, "question_ids", qids)
        rows = {}
        for rid, row in dict(self.consumer).items():
            row = tuple(row)
            if len(row) != len(qids):
                raise InvalidInputError(f"respondent {rid}: {len(row)} answers for {len(qids)} questions")
            for qid, value in zip(qids, row):
                if value is None:
                    continue
                if not isinstance(value, int) or not RESPONSE_MIN <= value <= RESPONSE_MAX:
                    raise InvalidInputError(
                        f"respondent {rid}, question {qid}: answer {value!r} outside "
                        f"[{RESPONSE_MIN}, {RESPONSE_MAX}]"
                    )
            rows[rid] = row
        object.__setattr__(self, "consumer", rows)

        bids = tuple(self.bonus_ids)
        object.__setattr__(self, "bonus_ids", bids)
        brows = {}
        for eid, row in dict(self.expert_bonus).items():
            row = tuple(row)
            if len(row) != len(bids):
                raise InvalidInputError(f"expert {eid}: {len(row)} bonus ratings for {len(bids)} indicators")
            for bid, value in zip(bids, row):
                if not isinstance(value, int) or not RESPONSE_MIN <= value <= RESPONSE_MAX:
                    raise InvalidInputError(
                        f"expert {eid}, bonus indicator {bid}: rating {value!r} outside "
                        f"[{RESPONSE_MIN}, {RESPONSE_MAX}]"
                    )
            brows[eid] = row
        object.__setattr__(self, "expert_bonus", brows)

    @property
    def respondents(self) -> tuple[str, ...]:
        return tuple(self.consumer)

    def complete_respondents(self) -> tuple[str, ...]:
        return tuple(rid for rid, row in self.consumer.items() if all(v is not None for v in row))

    def missing_cells(self) -> tuple[tuple[str, str], ...]:
        """(respondent_id, question_id) pairs with no answer."""
        out = []
        for rid, row in self.consumer.items():
            for qid, value in zip(self.question_ids, row):
                if value is None:
                    out.append((rid, qid))
        return tuple(out)

    def with_bonus(self, bonus_ids: Sequence[str], expert_bonus: Mapping[str, Sequence[int]]) -> "ResponseSet":
        return ResponseSet(
            question_ids=self.question_ids,
            consumer=self.consumer,
            bonus_ids=tuple(bonus_ids),
            expert_bonus={k: tuple(v) for k, v in expert_bonus.items()},
        )
