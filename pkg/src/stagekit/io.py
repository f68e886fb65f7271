"""CSV ingestion and emission with strict validation.

All files are UTF-8 with a mandatory header row; emitted files use LF line
endings, '.' decimals, and no timestamps, so identical inputs always produce
byte-identical outputs. Every parse error names the offending file and, where
it applies, the row/column cell.
"""

from __future__ import annotations

import csv
import re
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .ahp import PairwiseMatrix
from .consensus import RoundConsensus
from .errors import InvalidInputError, SchemaError
from .model import (
    ExpertProfile,
    Familiarity,
    IdentityGroup,
    Impact,
    IndicatorNode,
    IndicatorTree,
    Instrument,
    JudgmentBasis,
    Level,
    RatingRound,
    ResponseSet,
    validate_tree,
)

_TRUE = {"true", "1", "yes"}
_FALSE = {"false", "0", "no", ""}

_BASIS_COLUMNS = (
    ("basis_theory", JudgmentBasis.THEORETICAL_ANALYSIS),
    ("basis_practice", JudgmentBasis.PRACTICAL_EXPERIENCE),
    ("basis_peer", JudgmentBasis.PEER_REFERENCE),
    ("basis_intuition", JudgmentBasis.INTUITION),
)


def _read_rows(path: str | Path) -> tuple[list[str], list[list[str]]]:
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"{path}: file not found")
    with open(path, encoding="utf-8-sig", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file (header row is mandatory)") from None
        rows = [row for row in reader if any(cell.strip() for cell in row)]
    return [h.strip() for h in header], rows


def _cell(row: list[str], i: int) -> str:
    return row[i].strip() if i < len(row) else ""


def _require_columns(path: Path, header: list[str], required: Sequence[str],
                     optional: Sequence[str] = ()) -> dict[str, int]:
    missing = [c for c in required if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
    allowed = set(required) | set(optional)
    unknown = [c for c in header if c not in allowed]
    if unknown:
        raise SchemaError(f"{path}: unknown column(s) {', '.join(unknown)}")
    if len(set(header)) != len(header):
        raise SchemaError(f"{path}: duplicated column in header")
    return {c: header.index(c) for c in header}


def _enum_value(path: Path, row_id: str, column: str, raw: str, enum_cls):
    try:
        return enum_cls(raw)
    except ValueError:
        valid = ", ".join(e.value for e in enum_cls)
        raise SchemaError(
            f"{path}: row {row_id!r}, column {column!r}: {raw!r} is not one of: {valid}"
        ) from None


def parse_indicators(path: str | Path) -> IndicatorTree:
    """Read an indicator tree (id,name,level,parent_id,bonus[,local_weight,global_weight])."""
    path = Path(path)
    header, rows = _read_rows(path)
    col = _require_columns(
        path, header,
        required=("id", "name", "level", "parent_id", "bonus"),
        optional=("local_weight", "global_weight"),
    )
    nodes = []
    for row in rows:
        node_id = _cell(row, col["id"])
        if not node_id:
            raise SchemaError(f"{path}: row with empty id")
        level = _enum_value(path, node_id, "level", _cell(row, col["level"]), Level)
        bonus_raw = _cell(row, col["bonus"]).lower()
        if bonus_raw in _TRUE:
            bonus = True
        elif bonus_raw in _FALSE:
            bonus = False
        else:
            raise SchemaError(f"{path}: row {node_id!r}: bonus must be true/false, got {bonus_raw!r}")
        weights = {}
        for key in ("local_weight", "global_weight"):
            if key not in col:
                weights[key] = None
                continue
            raw = _cell(row, col[key])
            try:
                weights[key] = float(raw) if raw else None
            except ValueError:
                raise SchemaError(f"{path}: row {node_id!r}: {key} {raw!r} is not a number") from None
        try:
            nodes.append(IndicatorNode(
                id=node_id,
                name=_cell(row, col["name"]),
                level=level,
                parent_id=_cell(row, col["parent_id"]) or None,
                local_weight=weights["local_weight"],
                global_weight=weights["global_weight"],
                bonus=bonus,
            ))
        except InvalidInputError as exc:
            raise SchemaError(f"{path}: {exc}") from None
    tree = IndicatorTree(nodes=tuple(nodes))
    problems = validate_tree(tree)
    if problems:
        raise SchemaError(f"{path}: invalid indicator tree: " + "; ".join(problems))
    return tree


def emit_indicators(tree: IndicatorTree, path: str | Path) -> None:
    """Write a tree back to CSV; weight columns appear iff any node has weights."""
    with_weights = any(n.local_weight is not None or n.global_weight is not None
                       for n in tree.nodes)
    header = ["id", "name", "level", "parent_id", "bonus"]
    if with_weights:
        header += ["local_weight", "global_weight"]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for n in tree.nodes:  # already sorted by id
            row = [n.id, n.name, n.level.value, n.parent_id or "",
                   "true" if n.bonus else "false"]
            if with_weights:
                row += ["" if n.local_weight is None else repr(n.local_weight),
                        "" if n.global_weight is None else repr(n.global_weight)]
            writer.writerow(row)


def parse_experts(path: str | Path) -> tuple[ExpertProfile, ...]:
    """Read expert profiles (id,group,familiarity,basis_theory,...,basis_intuition)."""
    path = Path(path)
    header, rows = _read_rows(path)
    col = _require_columns(
        path, header,
        required=("id", "group", "familiarity") + tuple(c for c, _ in _BASIS_COLUMNS),
    )
    profiles = []
    seen: set[str] = set()
    for row in rows:
        expert_id = _cell(row, col["id"])
        if not expert_id:
            raise SchemaError(f"{path}: row with empty expert id")
        if expert_id in seen:
            raise SchemaError(f"{path}: duplicate expert id {expert_id!r}")
        seen.add(expert_id)
        basis = {}
        for column, b in _BASIS_COLUMNS:
            basis[b] = _enum_value(path, expert_id, column, _cell(row, col[column]), Impact)
        profiles.append(ExpertProfile(
            id=expert_id,
            identity_group=_enum_value(path, expert_id, "group", _cell(row, col["group"]), IdentityGroup),
            familiarity=_enum_value(path, expert_id, "familiarity",
                                    _cell(row, col["familiarity"]), Familiarity),
            judgment_basis=basis,
        ))
    return tuple(profiles)


def parse_ratings(
    path: str | Path,
    *,
    scale_max: int = 5,
    round_no: int | None = None,
    distributed: int | None = None,
    expected_ids: Iterable[str] | None = None,
) -> RatingRound:
    """Read one round's ratings (expert_id, then one column per indicator id).

    A row with any blank rating cell counts as a non-response: the expert is
    excluded from the matrix but still counted in the distributed total.
    When ``distributed`` is omitted it defaults to the file's row count;
    ``round_no`` defaults to the number in the filename (e.g. round2), else 1.
    """
    path = Path(path)
    header, rows = _read_rows(path)
    if not header or header[0] != "expert_id":
        raise SchemaError(f"{path}: first column must be expert_id")
    indicator_ids = tuple(header[1:])
    if not indicator_ids:
        raise SchemaError(f"{path}: no indicator columns")
    if len(set(indicator_ids)) != len(indicator_ids):
        dupes = sorted({i for i in indicator_ids if indicator_ids.count(i) > 1})
        raise SchemaError(f"{path}: duplicated indicator column(s) {', '.join(dupes)}")
    if expected_ids is not None:
        known = set(expected_ids)
        unknown = [i for i in indicator_ids if i not in known]
        if unknown:
            raise SchemaError(f"{path}: unknown indicator column(s) {', '.join(unknown)}")

    ratings: dict[str, tuple[int, ...]] = {}
    non_respondents: list[str] = []
    for row in rows:
        expert_id = _cell(row, 0)
        if not expert_id:
            raise SchemaError(f"{path}: row with empty expert id")
        if expert_id in ratings or expert_id in non_respondents:
            raise SchemaError(f"{path}: duplicate expert row {expert_id!r}")
        cells = [_cell(row, i + 1) for i in range(len(indicator_ids))]
        if any(c == "" for c in cells):
            non_respondents.append(expert_id)
            continue
        values = []
        for indicator_id, raw in zip(indicator_ids, cells):
            try:
                value = int(raw)
            except ValueError:
                raise SchemaError(
                    f"{path}: cell ({expert_id}, {indicator_id}): {raw!r} is not an integer"
                ) from None
            if not 1 <= value <= scale_max:
                raise SchemaError(
                    f"{path}: cell ({expert_id}, {indicator_id}): rating {value} "
                    f"outside [1, {scale_max}]"
                )
            values.append(value)
        ratings[expert_id] = tuple(values)

    if round_no is None:
        match = re.search(r"round[_-]?(\d+)", path.name, re.IGNORECASE)
        round_no = int(match.group(1)) if match else 1
    if distributed is None:
        distributed = len(ratings) + len(non_respondents)
    try:
        return RatingRound(
            round_no=round_no,
            scale_max=scale_max,
            distributed=distributed,
            indicator_ids=indicator_ids,
            ratings=ratings,
            non_respondents=tuple(non_respondents),
        )
    except InvalidInputError as exc:
        raise SchemaError(f"{path}: {exc}") from None


def parse_responses(path: str | Path, instrument: Instrument) -> ResponseSet:
    """Read consumer answers (respondent_id, then the instrument's question columns).

    Column order in the file is free; the result is normalized to the
    instrument's question order. Blank cells become missing answers.
    """
    path = Path(path)
    header, rows = _read_rows(path)
    if not header or header[0] != "respondent_id":
        raise SchemaError(f"{path}: first column must be respondent_id")
    file_qids = header[1:]
    expected = instrument.question_ids
    if sorted(file_qids) != sorted(expected):
        missing = sorted(set(expected) - set(file_qids))
        extra = sorted(set(file_qids) - set(expected))
        parts = []
        if missing:
            parts.append(f"missing question column(s) {', '.join(missing)}")
        if extra:
            parts.append(f"unknown column(s) {', '.join(extra)}")
        raise SchemaError(f"{path}: {'; '.join(parts)}")
    src = {qid: i + 1 for i, qid in enumerate(file_qids)}
    bounds = {q.id: (q.min_value, q.max_value) for q in instrument.questions}

    consumer: dict[str, tuple[int | None, ...]] = {}
    for row in rows:
        rid = _cell(row, 0)
        if not rid:
            raise SchemaError(f"{path}: row with empty respondent id")
        if rid in consumer:
            raise SchemaError(f"{path}: duplicate respondent id {rid!r}")
        values: list[int | None] = []
        for qid in expected:
            raw = _cell(row, src[qid])
            if raw == "":
                values.append(None)
                continue
            try:
                value = int(raw)
            except ValueError:
                raise SchemaError(f"{path}: cell ({rid}, {qid}): {raw!r} is not an integer") from None
            lo, hi = bounds[qid]
            if not lo <= value <= hi:
                raise SchemaError(f"{path}: cell ({rid}, {qid}): answer {value} outside [{lo}, {hi}]")
            values.append(value)
        consumer[rid] = tuple(values)
    return ResponseSet(question_ids=expected, consumer=consumer)


def parse_expert_bonus(path: str | Path, bonus_ids: Sequence[str]) -> dict[str, tuple[int, ...]]:
    """Read expert bonus ratings (expert_id, then one column per bonus indicator)."""
    path = Path(path)
    header, rows = _read_rows(path)
    if not header or header[0] != "expert_id":
        raise SchemaError(f"{path}: first column must be expert_id")
    col = _require_columns(path, header, required=("expert_id",) + tuple(bonus_ids))
    out: dict[str, tuple[int, ...]] = {}
    for row in rows:
        expert_id = _cell(row, 0)
        if not expert_id:
            raise SchemaError(f"{path}: row with empty expert id")
        if expert_id in out:
            raise SchemaError(f"{path}: duplicate expert row {expert_id!r}")
        values = []
        for bid in bonus_ids:
            raw = _cell(row, col[bid])
            try:
                value = int(raw)
            except ValueError:
                raise SchemaError(f"{path}: cell ({expert_id}, {bid}): {raw!r} is not an integer") from None
            if not 0 <= value <= 4:
                raise SchemaError(f"{path}: cell ({expert_id}, {bid}): rating {value} outside [0, 4]")
            values.append(value)
        out[expert_id] = tuple(values)
    return out


def parse_importance(path: str | Path) -> tuple[tuple[str, ...], list[tuple[int, ...]]]:
    """Read a rater x item importance matrix on the 1-7 scale."""
    path = Path(path)
    header, rows = _read_rows(path)
    if not header or header[0] != "rater_id":
        raise SchemaError(f"{path}: first column must be rater_id")
    item_ids = tuple(header[1:])
    if not item_ids:
        raise SchemaError(f"{path}: no item columns")
    if len(set(item_ids)) != len(item_ids):
        raise SchemaError(f"{path}: duplicated item column in header")
    matrix: list[tuple[int, ...]] = []
    seen: set[str] = set()
    for row in rows:
        rater_id = _cell(row, 0)
        if not rater_id:
            raise SchemaError(f"{path}: row with empty rater id")
        if rater_id in seen:
            raise SchemaError(f"{path}: duplicate rater row {rater_id!r}")
        seen.add(rater_id)
        values = []
        for i, item_id in enumerate(item_ids):
            raw = _cell(row, i + 1)
            try:
                value = int(raw)
            except ValueError:
                raise SchemaError(f"{path}: cell ({rater_id}, {item_id}): {raw!r} is not an integer") from None
            if not 1 <= value <= 7:
                raise SchemaError(f"{path}: cell ({rater_id}, {item_id}): rating {value} outside [1, 7]")
            values.append(value)
        matrix.append(tuple(values))
    return item_ids, matrix


def _parse_ratio(raw: str) -> float:
    if "/" in raw:
        return float(Fraction(raw))
    return float(raw)


def parse_pairwise(path: str | Path) -> PairwiseMatrix:
    """Read a square pairwise table (id header row/column; fractions like 1/3 accepted)."""
    path = Path(path)
    header, rows = _read_rows(path)
    ids = tuple(header[1:])
    if not ids:
        raise SchemaError(f"{path}: no indicator columns")
    if len(rows) != len(ids):
        raise SchemaError(f"{path}: expected {len(ids)} rows for {len(ids)} columns, got {len(rows)}")
    entries = []
    for expected_id, row in zip(ids, rows):
        row_id = _cell(row, 0)
        if row_id != expected_id:
            raise SchemaError(
                f"{path}: row ids must mirror the header order; expected {expected_id!r}, got {row_id!r}"
            )
        values = []
        for i, col_id in enumerate(ids):
            raw = _cell(row, i + 1)
            try:
                values.append(_parse_ratio(raw))
            except (ValueError, ZeroDivisionError):
                raise SchemaError(f"{path}: cell ({row_id}, {col_id}): {raw!r} is not a number") from None
        entries.append(tuple(values))
    try:
        return PairwiseMatrix(ids=ids, entries=tuple(entries))
    except InvalidInputError as exc:
        raise SchemaError(f"{path}: {exc}") from None


def emit_round_form(
    prev: RoundConsensus,
    retained: Sequence[str],
    round_no: int,
    path: str | Path,
    names: Mapping[str, str] | None = None,
) -> None:
    """Write the next round's consultation form carrying the prior-round means.

    Columns: indicator_id, name, prev_mean, rating (left blank for the expert);
    rows sorted by indicator id; byte-deterministic.
    """
    if round_no < 2:
        raise InvalidInputError(f"a consultation form carries prior means; round_no must be >= 2, got {round_no}")
    if not retained:
        raise InvalidInputError("no retained indicators; a round with no indicators is meaningless")
    missing = [i for i in retained if i not in prev.stats]
    if missing:
        raise InvalidInputError(
            f"retained indicator(s) absent from round {prev.round_no}: {', '.join(sorted(missing))}"
        )
    names = names or {}
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["indicator_id", "name", "prev_mean", "rating"])
        for indicator_id in sorted(retained):
            writer.writerow([
                indicator_id,
                names.get(indicator_id, indicator_id),
                format(prev.stats[indicator_id].mean, ".4f"),
                "",
            ])
