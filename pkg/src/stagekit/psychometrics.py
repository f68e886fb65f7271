"""Reliability (Cronbach's alpha, corrected item-total correlation, alpha-if-deleted)
and content validity (I-CVI, S-CVI) with the instrument's thresholds and flags.

Conventions: sample (n-1) variances throughout; negative alphas are reported
as-is; a respondent with any missing answer is excluded from reliability.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateDataError, InsufficientDataError, InvalidInputError
from .model import Instrument, ResponseSet

CITC_FLOOR = 0.3  # items below this corrected item-total correlation get flagged
ICVI_FLOOR = 0.78
SCVI_FLOOR = 0.90
RELEVANCE_FLOOR = 5  # on the 1-7 importance scale, >= 5 counts as relevant


def _as_matrix(scores) -> np.ndarray:
    arr = np.asarray(scores, dtype=float)
    if arr.ndim != 2:
        raise InvalidInputError(f"scores must be a 2-D respondent x item matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("scores matrix contains missing or non-finite values")
    return arr


def cronbach_alpha(scores) -> float:
    """Internal-consistency alpha: k/(k-1) * (1 - sum of item variances / total variance)."""
    arr = _as_matrix(scores)
    n, k = arr.shape
    if n < 2:
        raise InsufficientDataError(f"need >= 2 respondents, got {n}")
    if k < 2:
        raise InsufficientDataError(f"need >= 2 items, got {k}")
    item_vars = arr.var(axis=0, ddof=1)
    total_var = arr.sum(axis=1).var(ddof=1)
    if total_var == 0:
        raise DegenerateDataError("total-score variance is zero; alpha is undefined")
    return float(k / (k - 1) * (1.0 - item_vars.sum() / total_var))


def corrected_item_total(scores, item: int) -> float:
    """Pearson correlation of one item with the sum of all other items."""
    arr = _as_matrix(scores)
    n, k = arr.shape
    if not 0 <= item < k:
        raise InvalidInputError(f"item index {item} outside 0..{k - 1}")
    if k < 2:
        raise InsufficientDataError("need >= 2 items for an item-rest correlation")
    if n < 2:
        raise InsufficientDataError(f"need >= 2 respondents, got {n}")
    x = arr[:, item]
    rest = arr.sum(axis=1) - x
    xc = x - x.mean()
    rc = rest - rest.mean()
    denom = float(np.sqrt((xc @ xc) * (rc @ rc)))
    if denom == 0:
        raise DegenerateDataError(
            "constant item or constant rest-score; correlation is undefined"
        )
    return float((xc @ rc) / denom)


def alpha_if_deleted(scores, item: int) -> float:
    """Alpha of the matrix with one item column removed (needs >= 3 items)."""
    arr = _as_matrix(scores)
    k = arr.shape[1]
    if k < 3:
        raise InsufficientDataError(
            f"alpha-if-deleted needs >= 3 items (deleting one of {k} leaves a single column)"
        )
    if not 0 <= item < k:
        raise InvalidInputError(f"item index {item} outside 0..{k - 1}")
    return cronbach_alpha(np.delete(arr, item, axis=1))


def i_cvi(ratings: Sequence[int], relevance_floor: int = RELEVANCE_FLOOR) -> float:
    """Fraction of raters scoring the item at or above the relevance floor."""
    if len(ratings) == 0:
        raise InvalidInputError("no ratings given")
    for r in ratings:
        if not isinstance(r, (int, np.integer)) or not 1 <= int(r) <= 7:
            raise InvalidInputError(f"importance rating {r!r} outside 1..7")
    return sum(1 for r in ratings if r >= relevance_floor) / len(ratings)


def s_cvi(i_cvis: Sequence[float]) -> float:
    """Scale-level content validity: the mean of the item-level indices."""
    if len(i_cvis) == 0:
        raise InvalidInputError("no item-level indices given")
    for v in i_cvis:
        if not 0.0 <= v <= 1.0:
            raise InvalidInputError(f"I-CVI {v!r} outside [0, 1]")
    return float(sum(i_cvis)) / len(i_cvis)


@dataclass(frozen=True)
class IndexReliability:
    index_id: str
    n_questions: int
    alpha: float | None
    note: str | None = None


@dataclass(frozen=True)
class QuestionReliability:
    question_id: str
    index_id: str
    citc: float | None
    alpha_if_deleted: float | None  # None for 2-question indices (not applicable)
    flagged: bool  # True iff citc is defined and below CITC_FLOOR
    note: str | None = None


@dataclass(frozen=True)
class ReliabilityTable:
    n_respondents: int  # complete respondents entering the computation
    n_excluded: int  # respondents dropped for missing answers
    total_alpha: float
    indices: tuple[IndexReliability, ...]
    questions: tuple[QuestionReliability, ...]


def reliability_report(responses: ResponseSet, instrument: Instrument) -> ReliabilityTable:
    """Per-index and total alpha plus per-question CITC / alpha-if-deleted.

    Statistics are computed per index (CITC pairs a question with the rest of
    its own index; alpha-if-deleted only where the index keeps >= 2 questions
    after deletion). Index-level degeneracies are reported inline as notes
    rather than aborting the table.
    """
    if tuple(responses.question_ids) != instrument.question_ids:
        raise InvalidInputError("response columns do not match the instrument's questions")
    complete = responses.complete_respondents()
    if len(complete) < 2:
        raise InsufficientDataError(
            f"need >= 2 complete respondents, got {len(complete)}"
        )
    data = np.asarray([responses.consumer[rid] for rid in complete], dtype=float)
    col_of = {qid: i for i, qid in enumerate(responses.question_ids)}

    total_alpha = cronbach_alpha(data)

    index_rows: list[IndexReliability] = []
    question_rows: list[QuestionReliability] = []
    for index_id, qids in instrument.indices:
        cols = [col_of[q] for q in qids]
        sub = data[:, cols]
        k = len(qids)

        alpha = None
        note = None
        if k < 2:
            note = "single question; alpha not applicable"
        else:
            try:
                alpha = cronbach_alpha(sub)
            except DegenerateDataError as exc:
                note = str(exc)
        index_rows.append(IndexReliability(index_id=index_id, n_questions=k, alpha=alpha, note=note))

        for j, qid in enumerate(qids):
            citc = None
            q_note = None
            if k < 2:
                q_note = "single question; item-rest correlation not applicable"
            else:
                try:
                    citc = corrected_item_total(sub, j)
                except DegenerateDataError as exc:
                    q_note = str(exc)
            aid = None
            if k >= 3:
                try:
                    aid = alpha_if_deleted(sub, j)
                except DegenerateDataError as exc:
                    q_note = str(exc) if q_note is None else f"{q_note}; {exc}"
            question_rows.append(QuestionReliability(
                question_id=qid,
                index_id=index_id,
                citc=citc,
                alpha_if_deleted=aid,
                flagged=citc is not None and citc < CITC_FLOOR,
                note=q_note,
            ))

    return ReliabilityTable(
        n_respondents=len(complete),
        n_excluded=len(responses.consumer) - len(complete),
        total_alpha=total_alpha,
        indices=tuple(index_rows),
        questions=tuple(question_rows),
    )


@dataclass(frozen=True)
class ItemValidity:
    item_id: str
    importance_mean: float
    i_cvi: float
    passes: bool


@dataclass(frozen=True)
class ValidityTable:
    n_raters: int
    relevance_floor: int
    items: tuple[ItemValidity, ...]
    s_cvi: float
    s_cvi_passes: bool


def validity_report(
    item_ids: Sequence[str],
    ratings: Sequence[Sequence[int]],
    *,
    relevance_floor: int = RELEVANCE_FLOOR,
    icvi_floor: float = ICVI_FLOOR,
    scvi_floor: float = SCVI_FLOOR,
) -> ValidityTable:
    """Content validity from a complete rater x item importance matrix (1-7)."""
    ids = tuple(item_ids)
    if not ids:
        raise InvalidInputError("no items given")
    rows = [tuple(row) for row in ratings]
    if not rows:
        raise InvalidInputError("need at least one rater")
    for row in rows:
        if len(row) != len(ids):
            raise InvalidInputError(
                f"rater row has {len(row)} ratings for {len(ids)} items"
            )
    items: list[ItemValidity] = []
    for j, item_id in enumerate(ids):
        column = [row[j] for row in rows]
        cvi = i_cvi(column, relevance_floor)
        items.append(ItemValidity(
            item_id=item_id,
            importance_mean=float(np.mean(column)),
            i_cvi=cvi,
            passes=cvi >= icvi_floor,
        ))
    scale = s_cvi([it.i_cvi for it in items])
    return ValidityTable(
        n_raters=len(rows),
        relevance_floor=relevance_floor,
        items=tuple(items),
        s_cvi=scale,
        s_cvi_passes=scale >= scvi_floor,
    )
