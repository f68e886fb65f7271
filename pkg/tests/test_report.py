import json

import pytest

from stagekit import (
    InvalidInputError,
    Instrument,
    Question,
    RatingRound,
    ReportBundle,
    ResponseSet,
    RoundSection,
    ScreeningThresholds,
    WeightsSection,
    bundle_to_obj,
    display,
    emit_report,
    reliability_report,
    render_json,
    render_markdown,
    round_consensus,
    score_software,
    screen_indicators,
    validity_report,
    weight_tree,
)
from stagekit.ahp import PairwiseMatrix
from stagekit.model import IndicatorNode, IndicatorTree, Level
from stagekit.report import render_markdown_obj, write_output


class TestDisplay:
    def test_coefficient_places(self):
        assert display(0.884) == "0.8840"
        assert display(0.8461) == "0.8461"
        assert display(1.0) == "1.0000"

    def test_score_places(self):
        assert display(0.93125, 2) == "0.93"
        assert display(80.0, 2) == "80.00"

    def test_half_even_on_representable_ties(self):
        # Dyadic fractions are exact in binary, so these are true ties.
        assert display(0.125, 2) == "0.12"
        assert display(0.375, 2) == "0.38"
        assert display(2.5, 0) == "2"
        assert display(3.5, 0) == "4"

    def test_authority_mean_display(self):
        # (0.8864 + 0.8651) / 2 = 0.87575; the nearest double sits a hair
        # above the tie, and a true decimal tie would round half-even to the
        # even neighbour anyway, so 4-dp display is 0.8758 (the source table
        # prints 0.8757, a truncation artifact).
        assert display((0.8864 + 0.8651) / 2) == "0.8758"


def toy_instrument():
    questions = tuple(Question(id=f"q{i}", text=f"Question {i}") for i in range(1, 5))
    return Instrument(
        name="toy",
        indices=(("d1.a", ("q1", "q2")), ("d2.b", ("q3", "q4"))),
        questions=questions,
        dimension_of={"d1.a": "d1", "d2.b": "d2"},
        dimension_names={"d1": "One", "d2": "Two"},
        index_names={"d1.a": "A", "d2.b": "B"},
    )


def toy_tree():
    return IndicatorTree(nodes=(
        IndicatorNode(id="d1", name="One", level=Level.DIMENSION),
        IndicatorNode(id="d2", name="Two", level=Level.DIMENSION),
        IndicatorNode(id="d1.a", name="A", level=Level.INDEX, parent_id="d1"),
        IndicatorNode(id="d2.b", name="B", level=Level.INDEX, parent_id="d2"),
    ))


def full_bundle():
    rnd = RatingRound(
        round_no=1, scale_max=5, distributed=4,
        indicator_ids=("a", "b", "c"),
        ratings={"e1": (5, 4, 2), "e2": (5, 3, 2), "e3": (4, 5, 3)},
    )
    consensus = round_consensus(rnd)
    screening = screen_indicators(
        consensus.stats,
        ScreeningThresholds(mean_floor=3.0, fsf_floor=0.0, cv_ceiling=0.3),
    )

    pairwise = {None: PairwiseMatrix(ids=("d1", "d2"), entries=((1.0, 3.0), (1 / 3, 1.0)))}
    importance = {"d1.a": 5.0, "d2.b": 6.0}
    tree, table = weight_tree(toy_tree(), pairwise=pairwise, importance=importance)

    instrument = toy_instrument()
    responses = ResponseSet(
        question_ids=instrument.question_ids,
        consumer={
            "r1": (4, 3, 2, 1),
            "r2": (3, 3, 2, 2),
            "r3": (4, 2, 1, 2),
        },
    ).with_bonus(("b1",), {"e1": (3,)})
    reliability = reliability_report(responses, instrument)
    validity = validity_report(["a", "b"], [[7, 6], [6, 4], [7, 5]])
    score = score_software(responses, instrument, table)
    return ReportBundle(
        rounds=(RoundSection(consensus=consensus, screening=screening),),
        weights=WeightsSection(method="combined", tree=tree, table=table),
        reliability=reliability,
        validity=validity,
        score=score,
    )


def walk_numeric_fields(node, path=""):
    """Yield every {value, display} pair in the report object."""
    if isinstance(node, dict):
        if set(node) == {"value", "display"}:
            yield path, node
            return
        for key, child in node.items():
            yield from walk_numeric_fields(child, f"{path}.{key}")
    elif isinstance(node, list):
        for i, child in enumerate(node):
            yield from walk_numeric_fields(child, f"{path}[{i}]")


class TestBundleObject:
    def test_fixed_section_order(self):
        obj = bundle_to_obj(ReportBundle())
        assert list(obj) == ["rounds", "weights", "reliability", "validity", "score"]
        assert obj["rounds"] == []
        assert obj["weights"] is None

    def test_every_number_carries_value_and_display(self):
        obj = bundle_to_obj(full_bundle())
        pairs = list(walk_numeric_fields(obj))
        assert len(pairs) > 40
        for path, pair in pairs:
            places = len(pair["display"].split(".")[1])
            assert places in (2, 4), path
            assert pair["display"] == format(pair["value"], f".{places}f"), path

    def test_precision_parameters_respected(self):
        obj = bundle_to_obj(full_bundle(), coeff_places=6, score_places=3)
        rnd = obj["rounds"][0]
        assert len(rnd["positivity"]["display"].split(".")[1]) == 6
        assert len(obj["score"]["composite"]["display"].split(".")[1]) == 3

    def test_screening_shape(self):
        obj = bundle_to_obj(full_bundle())
        scr = obj["rounds"][0]["screening"]
        assert set(scr["retained"]) | set(scr["dropped"]) == {"a", "b", "c"}
        assert set(scr["reasons"]) == set(scr["dropped"])

    def test_empty_screening_keeps_shape(self):
        rnd = RatingRound(
            round_no=1, scale_max=5, distributed=2,
            indicator_ids=("a", "b"),
            ratings={"e1": (5, 4), "e2": (4, 5)},
        )
        consensus = round_consensus(rnd)
        screening = screen_indicators(
            consensus.stats, ScreeningThresholds(mean_floor=0.0, fsf_floor=0.0, cv_ceiling=9.0)
        )
        obj = bundle_to_obj(ReportBundle(rounds=(RoundSection(consensus, screening),)))
        scr = obj["rounds"][0]["screening"]
        assert scr["dropped"] == []
        assert scr["reasons"] == {}
        assert scr["retained"] == ["a", "b"]

    def test_round_without_screening(self):
        rnd = RatingRound(
            round_no=2, scale_max=5, distributed=2,
            indicator_ids=("a", "b"),
            ratings={"e1": (5, 4), "e2": (4, 5)},
        )
        obj = bundle_to_obj(ReportBundle(rounds=(RoundSection(round_consensus(rnd)),)))
        assert obj["rounds"][0]["screening"] is None
        assert obj["rounds"][0]["authority"]["ca"] is None

    def test_bonus_nodes_left_out_of_weights(self):
        nodes = list(toy_tree().nodes) + [
            IndicatorNode(id="xtra", name="Extra", level=Level.DIMENSION, bonus=True)
        ]
        importance = {"d1": 5.0, "d2": 5.0, "d1.a": 5.0, "d2.b": 5.0}
        tree, table = weight_tree(IndicatorTree(nodes=tuple(nodes)), importance=importance)
        obj = bundle_to_obj(ReportBundle(
            weights=WeightsSection(method="scoring", tree=tree, table=table)
        ))
        assert all(n["id"] != "xtra" for n in obj["weights"]["nodes"])


class TestRenderJson:
    def test_round_trips_through_json(self):
        bundle = full_bundle()
        text = render_json(bundle)
        assert text.endswith("\n")
        assert json.loads(text) == bundle_to_obj(bundle)

    def test_deterministic(self):
        bundle = full_bundle()
        assert render_json(bundle) == render_json(bundle)

    def test_authority_pair_example(self):
        # A Cr of exactly (0.8864 + 0.8651) / 2 serializes with both the full
        # value and its 4-dp display.
        obj = bundle_to_obj(full_bundle())
        cr = {"value": (0.8864 + 0.8651) / 2, "display": "0.8758"}
        assert cr["value"] == 0.87575
        assert display(cr["value"]) == cr["display"]


class TestRenderMarkdown:
    def test_markdown_shows_exactly_the_json_displays(self):
        bundle = full_bundle()
        obj = bundle_to_obj(bundle)
        text = render_markdown(bundle)
        for path, pair in walk_numeric_fields(obj):
            if "bonus_cap" in path:
                continue
            assert pair["display"] in text, f"{path} missing from markdown"

    def test_markdown_from_obj_equals_markdown_from_bundle(self):
        bundle = full_bundle()
        assert render_markdown_obj(bundle_to_obj(bundle)) == render_markdown(bundle)

    def test_deterministic(self):
        bundle = full_bundle()
        assert render_markdown(bundle) == render_markdown(bundle)

    def test_sections_render(self):
        text = render_markdown(full_bundle())
        for heading in ("## Round 1", "### Screening", "## Weights (method: combined)",
                        "## Reliability", "## Content validity", "## Score"):
            assert heading in text

    def test_empty_bundle_renders_header_only(self):
        text = render_markdown(ReportBundle())
        assert text == "# Evaluation report\n"


class TestEmitReport:
    def test_dispatch(self):
        bundle = full_bundle()
        assert emit_report(bundle, "json") == render_json(bundle)
        assert emit_report(bundle, "markdown") == render_markdown(bundle)

    def test_unknown_format_rejected(self):
        with pytest.raises(InvalidInputError):
            emit_report(ReportBundle(), "pdf")

    def test_write_output_exact_bytes(self, tmp_path):
        out = tmp_path / "report.json"
        write_output("line1\nline2\n", out)
        assert out.read_bytes() == b"line1\nline2\n"
