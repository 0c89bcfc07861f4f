"""Interval algebra and dancer relations, checked against independent oracles."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus_kit import (
    ALLEN_ORACLE_PREDICATES,
    assert_witness_valid,
    doc_to_corpus,
    oracle_allen_names,
    oracle_allen_shots,
    oracle_dancer_relation_shots,
    small_doc,
)
from dvcm.generator import GenParams, generate_corpus
from dvcm.model import TimeInterval
from dvcm.temporal import (
    ALLEN_INVERSE,
    ALLEN_RELATIONS,
    DANCER_RELATIONS,
    Witness,
    allen_relation,
    evaluate_allen_between_dancers,
    evaluate_dancer_relation,
)


# --------------------------------------------------------------------------
# Allen's interval relations


def proper_intervals(bound: int) -> list[TimeInterval]:
    return [
        TimeInterval(s, e)
        for s in range(bound + 1)
        for e in range(s + 1, bound + 1)
    ]


def test_thirteen_distinct_relations_with_inverses():
    assert len(ALLEN_RELATIONS) == 13
    assert len(set(ALLEN_RELATIONS)) == 13
    assert set(ALLEN_INVERSE) == set(ALLEN_RELATIONS)
    for name, inverse in ALLEN_INVERSE.items():
        assert ALLEN_INVERSE[inverse] == name
    assert ALLEN_INVERSE["equals"] == "equals"
    assert ALLEN_INVERSE["before"] == "after"
    assert ALLEN_INVERSE["meets"] == "met_by"
    assert ALLEN_INVERSE["overlaps"] == "overlapped_by"
    assert ALLEN_INVERSE["starts"] == "started_by"
    assert ALLEN_INVERSE["during"] == "contains"
    assert ALLEN_INVERSE["finishes"] == "finished_by"


def test_exhaustive_partition_small_endpoints():
    """Over all proper intervals with endpoints in [0, 4], exactly one
    relation holds for each pair, it matches the endpoint-order oracle, and
    swapping the arguments yields the inverse relation.
    """
    intervals = proper_intervals(4)
    assert len(intervals) == 10
    for i1, i2 in itertools.product(intervals, repeat=2):
        oracle = oracle_allen_names(i1, i2)
        assert len(oracle) == 1, (i1, i2)
        got = allen_relation(i1, i2)
        assert got == oracle[0]
        assert allen_relation(i2, i1) == ALLEN_INVERSE[got]


@pytest.mark.parametrize(
    "i1, i2, expected",
    [
        (TimeInterval(0, 1), TimeInterval(2, 3), "before"),
        (TimeInterval(0, 2), TimeInterval(2, 3), "meets"),
        (TimeInterval(0, 2), TimeInterval(1, 3), "overlaps"),
        (TimeInterval(0, 1), TimeInterval(0, 3), "starts"),
        (TimeInterval(1, 2), TimeInterval(0, 3), "during"),
        (TimeInterval(2, 3), TimeInterval(0, 3), "finishes"),
        (TimeInterval(0, 3), TimeInterval(0, 3), "equals"),
        (TimeInterval(2, 3), TimeInterval(0, 1), "after"),
        (TimeInterval(2, 3), TimeInterval(0, 2), "met_by"),
        (TimeInterval(1, 3), TimeInterval(0, 2), "overlapped_by"),
        (TimeInterval(0, 3), TimeInterval(0, 1), "started_by"),
        (TimeInterval(0, 3), TimeInterval(1, 2), "contains"),
        (TimeInterval(0, 3), TimeInterval(2, 3), "finished_by"),
    ],
)
def test_each_relation_has_a_canonical_example(i1, i2, expected):
    assert allen_relation(i1, i2) == expected


def test_degenerate_intervals_are_rejected():
    with pytest.raises(ValueError, match="proper"):
        allen_relation(TimeInterval(1, 1), TimeInterval(0, 2))
    with pytest.raises(ValueError, match="proper"):
        allen_relation(TimeInterval(0, 2), TimeInterval(3, 3))


@st.composite
def proper_interval(draw):
    start = draw(st.integers(min_value=0, max_value=500))
    end = draw(st.integers(min_value=start + 1, max_value=501))
    return TimeInterval(start, end)


@given(proper_interval(), proper_interval())
@settings(max_examples=300)
def test_relation_matches_oracle_on_random_intervals(i1, i2):
    oracle = oracle_allen_names(i1, i2)
    assert len(oracle) == 1
    assert allen_relation(i1, i2) == oracle[0]
    assert allen_relation(i2, i1) == ALLEN_INVERSE[oracle[0]]


def test_oracle_predicates_cover_all_names():
    assert set(ALLEN_ORACLE_PREDICATES) == set(ALLEN_RELATIONS)


# --------------------------------------------------------------------------
# Dancer relations on the bundled fixture


def test_follows_witness_frozen(f1):
    witnesses = evaluate_dancer_relation(f1, f1.scene("sc2"), "follows", "da1", "da2")
    assert witnesses == [
        Witness("follows", "sc2", "da1", "da2", ("sh7",), ("sh8",), ("st6",))
    ]
    assert witnesses[0].shot_ids() == {"sh7", "sh8"}


def test_repeats_witnesses_frozen(f1):
    witnesses = evaluate_dancer_relation(f1, f1.scene("sc2"), "repeats", "da2", "da1")
    assert [(w.shots_a, w.shots_b, w.step_def_ids) for w in witnesses] == [
        (("sh7",), ("sh9",), ("st6",))
    ]


def test_performs_same_sequence_witness_frozen(f1):
    witnesses = evaluate_dancer_relation(
        f1, f1.scene("sc1"), "performs_same_sequence", "da1", "da2"
    )
    assert witnesses == [
        Witness(
            "performs_same_sequence",
            "sc1",
            "da1",
            "da2",
            ("sh1",),
            ("sh1",),
            ("st6",),
        )
    ]


def test_observes_witnesses_frozen(f1):
    in_sc1 = evaluate_dancer_relation(f1, f1.scene("sc1"), "observes", "da2", "da1")
    assert {w.shot_ids().pop() for w in in_sc1} == {"sh2"}
    in_sc2 = evaluate_dancer_relation(f1, f1.scene("sc2"), "observes", "da1", "da2")
    assert {w.shot_ids().pop() for w in in_sc2} == {"sh8"}
    # the observed dancer's step grounds the witness; shots_a records where
    # the watching dancer stands
    assert in_sc2[0].step_def_ids == ("st6",)
    assert in_sc2[0].shots_a == ("sh8",)
    assert in_sc2[0].shots_b == ("sh8",)


def test_allowed_steps_filter(f1):
    scene = f1.scene("sc2")
    kept = evaluate_dancer_relation(
        f1, scene, "follows", "da1", "da2", allowed_steps=frozenset({"st6"})
    )
    assert len(kept) == 1
    dropped = evaluate_dancer_relation(
        f1, scene, "follows", "da1", "da2", allowed_steps=frozenset({"st1"})
    )
    assert dropped == []


def test_argument_validation(f1):
    scene = f1.scene("sc1")
    with pytest.raises(ValueError, match="distinct"):
        evaluate_dancer_relation(f1, scene, "follows", "da1", "da1")
    with pytest.raises(ValueError, match="unknown dancer relation"):
        evaluate_dancer_relation(f1, scene, "precedes", "da1", "da2")
    with pytest.raises(ValueError, match="distinct"):
        evaluate_allen_between_dancers(f1, scene, "equals", "da2", "da2")
    with pytest.raises(ValueError, match="unknown interval relation"):
        evaluate_allen_between_dancers(f1, scene, "touches", "da1", "da2")


def test_allen_between_dancers_frozen(f1):
    scene = f1.scene("sc2")
    equals = evaluate_allen_between_dancers(f1, scene, "equals", "da1", "da2")
    assert [(w.shots_a[0], w.shots_b[0]) for w in equals] == [
        ("sh6", "sh6"),
        ("sh7", "sh7"),
    ]
    meets = evaluate_allen_between_dancers(
        f1, scene, "meets", "da1", "da2", allowed_steps=frozenset({"st4"})
    )
    assert [(w.shots_a[0], w.shots_b[0]) for w in meets] == [
        ("sh5", "sh6"),
        ("sh6", "sh7"),
    ]
    for witness in equals + meets:
        assert_witness_valid(f1, witness)


def test_degenerate_shots_are_skipped():
    doc = small_doc()
    doc["shots"][0]["life_span"] = {"start": 1000, "end": 1000}
    corpus = doc_to_corpus(doc)
    scene = corpus.scene("x1")
    witnesses = evaluate_allen_between_dancers(corpus, scene, "equals", "d1", "d2")
    assert {w.shots_a[0] for w in witnesses} == {"h2"}
    before = evaluate_allen_between_dancers(corpus, scene, "before", "d1", "d2")
    assert before == []


# --------------------------------------------------------------------------
# Oracle sweep over seeded corpora


@pytest.mark.parametrize("seed", range(25))
def test_relations_match_bruteforce_oracle(seed):
    params = GenParams(
        n_shots=6 + seed % 10,
        n_dancers=2 + seed % 3,
        n_step_defs=4,
        seed=seed,
    )
    corpus = generate_corpus(params)
    dancer_ids = sorted(corpus.dancers)
    for scene in corpus.scenes.values():
        for dancer_a, dancer_b in itertools.permutations(dancer_ids, 2):
            for relation in DANCER_RELATIONS:
                witnesses = evaluate_dancer_relation(
                    corpus, scene, relation, dancer_a, dancer_b
                )
                got = set().union(*(w.shot_ids() for w in witnesses), set())
                want = oracle_dancer_relation_shots(
                    corpus, scene, relation, dancer_a, dancer_b
                )
                assert got == want, (seed, scene.id, relation, dancer_a, dancer_b)
                for witness in witnesses:
                    assert_witness_valid(corpus, witness)
            for relation in ("equals", "before", "meets", "during"):
                witnesses = evaluate_allen_between_dancers(
                    corpus, scene, relation, dancer_a, dancer_b
                )
                got = set().union(*(w.shot_ids() for w in witnesses), set())
                want = oracle_allen_shots(corpus, scene, relation, dancer_a, dancer_b)
                assert got == want, (seed, scene.id, relation)
                for witness in witnesses:
                    assert_witness_valid(corpus, witness)
