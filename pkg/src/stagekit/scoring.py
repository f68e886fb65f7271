"""Weighted scoring of one piece of software against the instrument.

Consumer answers (0-4) are normalized to [0,1], averaged into index scores,
weighted into 0-100 dimension scores, and combined with the dimension weights
into the core composite. The expert bonus is a separate additive component
with a configurable cap, reported both raw (0 to 100+cap) and rescaled back
to a 0-100 range.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .ahp import WeightTable
from .errors import (
    DegenerateDataError,
    IncompleteWeightsError,
    InvalidInputError,
)
from .model import Instrument, ResponseSet

DEFAULT_BONUS_CAP = 10.0
_TOL = 1e-9


@dataclass(frozen=True)
class ConsumerScores:
    """Dimension/index scores (0-100) per respondent and pooled."""

    per_respondent: Mapping[str, Mapping[str, float]]
    pooled_dimensions: Mapping[str, float]
    pooled_indices: Mapping[str, float]
    imputed: tuple[tuple[str, str], ...]  # (respondent_id, question_id)


@dataclass(frozen=True)
class ScoreCard:
    """The final verdict: weighted core composite plus expert bonus."""

    dimension_scores: Mapping[str, float]
    dimension_weights: Mapping[str, float]
    composite: float
    bonus: float
    bonus_cap: float
    final: float  # composite + bonus, range 0 .. 100 + cap
    final_rescaled: float  # final mapped back onto 0-100
    n_respondents: int
    imputed: tuple[tuple[str, str], ...]


def _local_weights(weights: WeightTable | Mapping[str, float]) -> Mapping[str, float]:
    return weights.local_weights if isinstance(weights, WeightTable) else weights


def score_consumer(
    responses: ResponseSet,
    instrument: Instrument,
    weights: WeightTable | Mapping[str, float],
) -> ConsumerScores:
    """Score every respondent and pool the results.

    A missing answer is imputed with the mean of that question's present
    answers (and recorded in ``imputed``); a dimension score is
    100 * sum over its indices of local_weight * mean question score.
    """
    if not responses.consumer:
        raise InvalidInputError("no respondents to score")
    local = _local_weights(weights)
    for dim in instrument.dimensions():
        if dim not in local:
            raise IncompleteWeightsError(f"no local weight for dimension {dim}")
        for idx in instrument.indices_of_dimension(dim):
            if idx not in local:
                raise IncompleteWeightsError(f"no local weight for index {idx}")

    max_of = {q.id: q.max_value for q in instrument.questions}
    col_of = {qid: i for i, qid in enumerate(responses.question_ids)}

    # Per-question means over present answers, for imputation.
    q_mean: dict[str, float] = {}
    for qid in responses.question_ids:
        present = [row[col_of[qid]] for row in responses.consumer.values()
                   if row[col_of[qid]] is not None]
        if not present:
            raise DegenerateDataError(f"question {qid} has no answers at all; cannot impute")
        q_mean[qid] = sum(present) / len(present)

    imputed = responses.missing_cells()
    per_respondent: dict[str, dict[str, float]] = {}
    index_accum: dict[str, float] = {idx: 0.0 for idx, _ in instrument.indices}
    for rid, row in responses.consumer.items():
        norm = {}
        for qid in responses.question_ids:
            value = row[col_of[qid]]
            if value is None:
                value = q_mean[qid]
            norm[qid] = value / max_of[qid]
        dims = {}
        for dim in instrument.dimensions():
            acc = 0.0
            for idx in instrument.indices_of_dimension(dim):
                qids = instrument.questions_of(idx)
                idx_score = sum(norm[q] for q in qids) / len(qids)
                index_accum[idx] += idx_score
                acc += local[idx] * idx_score
            dims[dim] = 100.0 * acc
        per_respondent[rid] = dims

    n = len(per_respondent)
    pooled_dims = {
        dim: sum(scores[dim] for scores in per_respondent.values()) / n
        for dim in instrument.dimensions()
    }
    pooled_indices = {idx: 100.0 * total / n for idx, total in index_accum.items()}
    return ConsumerScores(
        per_respondent=per_respondent,
        pooled_dimensions=pooled_dims,
        pooled_indices=pooled_indices,
        imputed=imputed,
    )


def score_expert_bonus(
    bonus: Mapping[str, Sequence[int]] | Sequence[Sequence[int]],
    cap: float = DEFAULT_BONUS_CAP,
) -> float:
    """Mean bonus rating normalized to [0,1], scaled by the cap."""
    if cap <= 0:
        raise InvalidInputError(f"bonus cap must be positive, got {cap!r}")
    rows = list(bonus.values()) if isinstance(bonus, Mapping) else [list(r) for r in bonus]
    cells = [v for row in rows for v in row]
    if not cells:
        raise InvalidInputError("no expert bonus ratings given")
    for v in cells:
        if not isinstance(v, int) or not 0 <= v <= 4:
            raise InvalidInputError(f"bonus rating {v!r} outside [0, 4]")
    return (sum(cells) / len(cells)) / 4.0 * cap


def composite(
    core: Mapping[str, float],
    dim_weights: Mapping[str, float],
    bonus: float,
    *,
    cap: float = DEFAULT_BONUS_CAP,
    n_respondents: int = 0,
    imputed: tuple[tuple[str, str], ...] = (),
) -> ScoreCard:
    """Combine dimension scores and the bonus into the final scorecard."""
    missing = [d for d in core if d not in dim_weights]
    if missing:
        raise IncompleteWeightsError(f"no weight for dimension(s) {', '.join(sorted(missing))}")
    extra = [d for d in dim_weights if d not in core]
    if extra:
        raise InvalidInputError(f"weights given for unknown dimension(s) {', '.join(sorted(extra))}")
    total_w = sum(dim_weights.values())
    if abs(total_w - 1.0) > _TOL:
        raise InvalidInputError(f"dimension weights sum to {total_w!r}, expected 1")
    if cap <= 0:
        raise InvalidInputError(f"bonus cap must be positive, got {cap!r}")
    if not -_TOL <= bonus <= cap + _TOL:
        raise InvalidInputError(f"bonus {bonus!r} outside [0, {cap}]")

    core_score = sum(dim_weights[d] * core[d] for d in core)
    final = core_score + bonus
    return ScoreCard(
        dimension_scores=dict(core),
        dimension_weights=dict(dim_weights),
        composite=core_score,
        bonus=bonus,
        bonus_cap=cap,
        final=final,
        final_rescaled=final / (100.0 + cap) * 100.0,
        n_respondents=n_respondents,
        imputed=imputed,
    )


def score_software(
    responses: ResponseSet,
    instrument: Instrument,
    weights: WeightTable | Mapping[str, float],
    *,
    bonus_cap: float = DEFAULT_BONUS_CAP,
) -> ScoreCard:
    """End-to-end scoring: consumer composite plus expert bonus (when present)."""
    consumer = score_consumer(responses, instrument, weights)
    local = _local_weights(weights)
    dim_weights = {dim: local[dim] for dim in instrument.dimensions()}
    bonus = (
        score_expert_bonus(responses.expert_bonus, bonus_cap)
        if responses.expert_bonus
        else 0.0
    )
    return composite(
        consumer.pooled_dimensions,
        dim_weights,
        bonus,
        cap=bonus_cap,
        n_respondents=len(responses.consumer),
        imputed=consumer.imputed,
    )


def question_proportional_weights(instrument: Instrument) -> dict[str, float]:
    """Local weights that give every question the same influence on the composite.

    Each dimension's weight is its share of the questionnaire's questions and
    each index's local weight is its share of the dimension's questions, so
    the composite reduces to the plain mean of all normalized question scores
    (times 100). This is the neutral "no expert weighting" configuration.
    """
    total = len(instrument.questions)
    if total == 0:
        raise InvalidInputError("instrument has no questions")
    out: dict[str, float] = {}
    for dim in instrument.dimensions():
        indices = instrument.indices_of_dimension(dim)
        dim_total = sum(len(instrument.questions_of(idx)) for idx in indices)
        out[dim] = dim_total / total
        for idx in indices:
            out[idx] = len(instrument.questions_of(idx)) / dim_total
    return out
