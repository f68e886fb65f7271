"""Deterministic report serialization.

Every numeric field is emitted as a {"value", "display"} pair: the value at
full precision, the display rounded half-even at a fixed number of decimals
(4 for coefficients/weights, 2 for CVI and scores). Markdown output renders
the same display strings as the JSON, so the two formats can never disagree;
neither contains timestamps, locales, or other run-dependent bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .ahp import WeightTable
from .consensus import RoundConsensus, ScreeningResult
from .errors import InvalidInputError
from .model import IndicatorTree
from .psychometrics import ReliabilityTable, ValidityTable
from .scoring import ScoreCard

COEFF_PLACES = 4
SCORE_PLACES = 2


def display(value: float, places: int = COEFF_PLACES) -> str:
    """Fixed-point display string; ties resolve half-even on the binary float."""
    return format(value, f".{places}f")


def _num(value: float, places: int) -> dict[str, Any]:
    return {"value": float(value), "display": display(value, places)}


def _opt(value: float | None, places: int) -> dict[str, Any] | None:
    return None if value is None else _num(value, places)


@dataclass(frozen=True)
class RoundSection:
    consensus: RoundConsensus
    screening: ScreeningResult | None = None


@dataclass(frozen=True)
class WeightsSection:
    method: str
    tree: IndicatorTree  # carrying the derived local/global weights
    table: WeightTable


@dataclass(frozen=True)
class ReportBundle:
    """Everything one evaluation produced, ready for serialization."""

    rounds: tuple[RoundSection, ...] = ()
    weights: WeightsSection | None = None
    reliability: ReliabilityTable | None = None
    validity: ValidityTable | None = None
    score: ScoreCard | None = None


def _round_obj(section: RoundSection, places: int) -> dict[str, Any]:
    c = section.consensus
    obj: dict[str, Any] = {
        "round_no": c.round_no,
        "scale_max": c.scale_max,
        "distributed": c.distributed,
        "returned": c.returned,
        "positivity": _num(c.positivity, places),
        "authority": {
            "ca": _opt(c.ca, places),
            "cs": _opt(c.cs, places),
            "cr": _opt(c.cr, places),
        },
        "kendall_w": _num(c.kendall_w, places),
        "indicators": [
            {
                "id": indicator_id,
                "mean": _num(s.mean, places),
                "sd": _num(s.sd, places),
                "cv": _num(s.cv, places),
                "full_score_freq": _num(s.full_score_freq, places),
            }
            for indicator_id, s in c.stats.items()
        ],
    }
    if section.screening is None:
        obj["screening"] = None
    else:
        scr = section.screening
        obj["screening"] = {
            "thresholds": {
                "mean_floor": _num(scr.thresholds.mean_floor, places),
                "fsf_floor": _num(scr.thresholds.fsf_floor, places),
                "cv_ceiling": _num(scr.thresholds.cv_ceiling, places),
            },
            "retained": list(scr.retained),
            "dropped": list(scr.dropped),
            "reasons": {i: list(scr.reasons[i]) for i in scr.dropped},
        }
    return obj


def _weights_obj(section: WeightsSection, places: int) -> dict[str, Any]:
    return {
        "method": section.method,
        "nodes": [
            {
                "id": node.id,
                "name": node.name,
                "level": node.level.value,
                "parent_id": node.parent_id,
                "local_weight": _opt(node.local_weight, places),
                "global_weight": _opt(node.global_weight, places),
            }
            for node in section.tree.nodes
            if not node.bonus
        ],
        "consistency": [
            {
                "group": "root" if g.parent_id is None else g.parent_id,
                "n": g.n,
                "lambda_max": _num(g.lambda_max, places),
                "ci": _num(g.ci, places),
                "cr": _num(g.cr, places),
                "acceptable": g.acceptable,
            }
            for g in section.table.consistency
        ],
    }


def _reliability_obj(table: ReliabilityTable, places: int) -> dict[str, Any]:
    return {
        "n_respondents": table.n_respondents,
        "n_excluded": table.n_excluded,
        "total_alpha": _num(table.total_alpha, places),
        "indices": [
            {
                "index_id": row.index_id,
                "n_questions": row.n_questions,
                "alpha": _opt(row.alpha, places),
                "note": row.note,
            }
            for row in table.indices
        ],
        "questions": [
            {
                "question_id": row.question_id,
                "index_id": row.index_id,
                "citc": _opt(row.citc, places),
                "alpha_if_deleted": _opt(row.alpha_if_deleted, places),
                "flagged": row.flagged,
                "note": row.note,
            }
            for row in table.questions
        ],
    }


def _validity_obj(table: ValidityTable, places: int) -> dict[str, Any]:
    return {
        "n_raters": table.n_raters,
        "relevance_floor": table.relevance_floor,
        "items": [
            {
                "item_id": item.item_id,
                "importance_mean": _num(item.importance_mean, places),
                "i_cvi": _num(item.i_cvi, places),
                "passes": item.passes,
            }
            for item in table.items
        ],
        "s_cvi": _num(table.s_cvi, places),
        "s_cvi_passes": table.s_cvi_passes,
    }


def _score_obj(card: ScoreCard, coeff_places: int, score_places: int) -> dict[str, Any]:
    return {
        "n_respondents": card.n_respondents,
        "dimensions": [
            {
                "id": dim,
                "weight": _num(card.dimension_weights[dim], coeff_places),
                "score": _num(card.dimension_scores[dim], score_places),
            }
            for dim in card.dimension_scores
        ],
        "composite": _num(card.composite, score_places),
        "bonus": _num(card.bonus, score_places),
        "bonus_cap": card.bonus_cap,
        "final": _num(card.final, score_places),
        "final_rescaled": _num(card.final_rescaled, score_places),
        "imputed": [[rid, qid] for rid, qid in card.imputed],
    }


def bundle_to_obj(
    bundle: ReportBundle,
    *,
    coeff_places: int = COEFF_PLACES,
    score_places: int = SCORE_PLACES,
) -> dict[str, Any]:
    """The bundle as a JSON-ready dict with a fixed key order."""
    return {
        "rounds": [_round_obj(s, coeff_places) for s in bundle.rounds],
        "weights": None if bundle.weights is None else _weights_obj(bundle.weights, coeff_places),
        "reliability": None if bundle.reliability is None
        else _reliability_obj(bundle.reliability, coeff_places),
        "validity": None if bundle.validity is None
        else _validity_obj(bundle.validity, score_places),
        "score": None if bundle.score is None
        else _score_obj(bundle.score, coeff_places, score_places),
    }


def render_json(bundle: ReportBundle, **places) -> str:
    return json.dumps(bundle_to_obj(bundle, **places), indent=2, ensure_ascii=False) + "\n"


def _md_table(headers: list[str], rows: list[list[str]]) -> list[str]:
    lines = ["| " + " | ".join(headers) + " |",
             "|" + "|".join(" --- " for _ in headers) + "|"]
    lines += ["| " + " | ".join(row) + " |" for row in rows]
    return lines


def _disp(field: Mapping[str, Any] | None, absent: str = "-") -> str:
    return absent if field is None else field["display"]


def render_markdown_obj(obj: Mapping[str, Any]) -> str:
    """Markdown report rendered from the JSON-ready dict (same display strings)."""
    out: list[str] = ["# Evaluation report", ""]

    for rnd in obj["rounds"]:
        out += [f"## Round {rnd['round_no']}", ""]
        out += _md_table(
            ["Distributed", "Returned", "Positivity", "Ca", "Cs", "Cr", "Kendall's W"],
            [[
                str(rnd["distributed"]),
                str(rnd["returned"]),
                _disp(rnd["positivity"]),
                _disp(rnd["authority"]["ca"]),
                _disp(rnd["authority"]["cs"]),
                _disp(rnd["authority"]["cr"]),
                _disp(rnd["kendall_w"]),
            ]],
        )
        out.append("")
        out += _md_table(
            ["Indicator", "Mean", "SD", "CV", "Full-score freq"],
            [[s["id"], _disp(s["mean"]), _disp(s["sd"]), _disp(s["cv"]),
              _disp(s["full_score_freq"])] for s in rnd["indicators"]],
        )
        out.append("")
        scr = rnd["screening"]
        if scr is not None:
            t = scr["thresholds"]
            out += [
                "### Screening",
                "",
                f"Thresholds: mean ≥ {_disp(t['mean_floor'])}, "
                f"full-score freq ≥ {_disp(t['fsf_floor'])}, "
                f"CV ≤ {_disp(t['cv_ceiling'])}",
                "",
                f"Retained ({len(scr['retained'])}): {', '.join(scr['retained']) or '(none)'}",
                "",
            ]
            if scr["dropped"]:
                out += _md_table(
                    ["Dropped", "Failed criteria"],
                    [[i, ", ".join(scr["reasons"][i])] for i in scr["dropped"]],
                )
            else:
                out.append("Dropped: (none)")
            out.append("")

    w = obj["weights"]
    if w is not None:
        out += [f"## Weights (method: {w['method']})", ""]
        out += _md_table(
            ["Node", "Level", "Local weight", "Global weight"],
            [[n["id"], n["level"], _disp(n["local_weight"]), _disp(n["global_weight"])]
             for n in w["nodes"]],
        )
        out.append("")
        if w["consistency"]:
            out += _md_table(
                ["Group", "n", "λmax", "CI", "CR", "Acceptable"],
                [[g["group"], str(g["n"]), _disp(g["lambda_max"]), _disp(g["ci"]),
                  _disp(g["cr"]), "yes" if g["acceptable"] else "no"]
                 for g in w["consistency"]],
            )
            out.append("")

    rel = obj["reliability"]
    if rel is not None:
        out += [
            "## Reliability",
            "",
            f"Complete respondents: {rel['n_respondents']} "
            f"(excluded for missing answers: {rel['n_excluded']})",
            "",
            f"Total-scale Cronbach's α: {_disp(rel['total_alpha'])}",
            "",
        ]
        out += _md_table(
            ["Index", "Questions", "α", "Note"],
            [[r["index_id"], str(r["n_questions"]), _disp(r["alpha"]), r["note"] or ""]
             for r in rel["indices"]],
        )
        out.append("")
        out += _md_table(
            ["Question", "Index", "CITC", "α if deleted", "Flagged"],
            [[q["question_id"], q["index_id"], _disp(q["citc"]),
              _disp(q["alpha_if_deleted"]), "yes" if q["flagged"] else ""]
             for q in rel["questions"]],
        )
        out.append("")

    val = obj["validity"]
    if val is not None:
        out += [
            "## Content validity",
            "",
            f"Raters: {val['n_raters']} (relevance floor: ≥ {val['relevance_floor']})",
            "",
        ]
        out += _md_table(
            ["Item", "Importance mean", "I-CVI", "Passes"],
            [[i["item_id"], _disp(i["importance_mean"]), _disp(i["i_cvi"]),
              "yes" if i["passes"] else "no"] for i in val["items"]],
        )
        out += [
            "",
            f"S-CVI: {_disp(val['s_cvi'])} "
            f"({'passes' if val['s_cvi_passes'] else 'fails'})",
            "",
        ]

    score = obj["score"]
    if score is not None:
        out += ["## Score", ""]
        out += _md_table(
            ["Dimension", "Weight", "Score"],
            [[d["id"], _disp(d["weight"]), _disp(d["score"])] for d in score["dimensions"]],
        )
        out += [
            "",
            f"Core composite (0–100): {_disp(score['composite'])}",
            f"Expert bonus (0–{score['bonus_cap']:g}): {_disp(score['bonus'])}",
            f"Final score: {_disp(score['final'])}",
            f"Final rescaled to 0–100: {_disp(score['final_rescaled'])}",
            f"Respondents: {score['n_respondents']}",
        ]
        if score["imputed"]:
            cells = ", ".join(f"({rid}, {qid})" for rid, qid in score["imputed"])
            out.append(f"Imputed answers: {cells}")
        out.append("")

    return "\n".join(out).rstrip("\n") + "\n"


def render_markdown(bundle: ReportBundle, **places) -> str:
    return render_markdown_obj(bundle_to_obj(bundle, **places))


def emit_report(bundle: ReportBundle, fmt: str = "json", **places) -> str:
    """Serialize the bundle; fmt is "json" or "markdown"."""
    if fmt == "json":
        return render_json(bundle, **places)
    if fmt == "markdown":
        return render_markdown(bundle, **places)
    raise InvalidInputError(f"unknown report format {fmt!r}")


def write_output(text: str, path: str | Path) -> None:
    """Write exactly the given text, LF endings, UTF-8."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
