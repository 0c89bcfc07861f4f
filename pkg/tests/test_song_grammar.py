"""Song type classification over scene component sequences."""

import itertools
import time

import pytest

from corpus_kit import doc_to_corpus, oracle_song_types, small_doc
from dvcm.song_types import classify_song_type, song_type_of_compound_scene

PA, AP, SA, CH = "PA", "AP", "SA", "CH"


@pytest.mark.parametrize(
    "components, expected",
    [
        ([PA, AP, SA], 1),
        ([PA, SA], 2),
        ([SA], 3),
        ([PA, AP, SA, CH, SA], 4),
        ([PA, SA, CH, SA], 5),
        ([SA, CH, SA], 6),
        ([PA, AP, SA, SA, SA], 1),
        ([PA, SA, SA], 2),
        ([SA, SA, SA, SA], 3),
        ([PA, AP, SA, CH, SA, CH, SA], 4),
        ([PA, SA, CH, SA, CH, SA], 5),
        ([SA, CH, SA, CH, SA], 6),
    ],
)
def test_accepted_sequences(components, expected):
    assert classify_song_type(components) == expected


@pytest.mark.parametrize(
    "components",
    [
        [],
        [PA],
        [AP],
        [CH],
        [PA, AP],
        [AP, SA],
        [SA, PA],
        [PA, AP, SA, CH],
        [SA, CH, SA, SA],
        [SA, SA, CH, SA],
        [SA, CH, CH, SA],
        [PA, PA, SA],
        [PA, AP, AP, SA],
    ],
)
def test_rejected_sequences(components):
    assert classify_song_type(components) is None


def test_unknown_component_raises():
    with pytest.raises(ValueError, match="unknown song component"):
        classify_song_type(["PA", "XX"])


def test_exhaustive_against_oracle_and_disjoint():
    """Every component sequence up to length six agrees with regular
    expressions for the six song structures, and no sequence matches two.
    """
    started = time.perf_counter()
    checked = 0
    for length in range(1, 7):
        for seq in itertools.product([PA, AP, SA, CH], repeat=length):
            expected = oracle_song_types(seq)
            assert len(expected) <= 1, seq
            got = classify_song_type(seq)
            assert got == (expected[0] if expected else None), seq
            checked += 1
    assert checked == 4 + 16 + 64 + 256 + 1024 + 4096
    assert time.perf_counter() - started < 1.0


def test_compound_scene_classification(f1):
    assert song_type_of_compound_scene(f1, "cs1") == 2
    small = doc_to_corpus(small_doc())
    assert song_type_of_compound_scene(small, "g1") == 3


def test_compound_scene_unknown_id(f1):
    with pytest.raises(KeyError):
        song_type_of_compound_scene(f1, "cs9")
