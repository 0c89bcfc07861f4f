"""Inverted-file construction, serialization, and staleness detection."""

import json

import pytest

from corpus_kit import doc_to_corpus, small_doc
from dvcm.engine import IndexedEngine
from dvcm.index import (
    IndexMismatchError,
    build_index,
    dumps_index,
    load_index,
    loads_index,
    save_index,
)
from dvcm.index import IndexFormatError
from dvcm.model import corpus_fingerprint


@pytest.fixture(scope="module")
def f1_index(f1):
    return build_index(f1)


def test_fingerprint_binds_index_to_corpus(f1, f1_index):
    assert f1_index.fingerprint == corpus_fingerprint(f1)


def test_dancer_postings(f1, f1_index):
    assert set(f1_index.dancers) == {"anitha", "lisa"}
    anitha_shots = {
        f1.shot_of_occurrence(occ_id) for occ_id in f1_index.dancers["anitha"]
    }
    assert anitha_shots == {"sh1", "sh2", "sh5", "sh6", "sh7", "sh9"}


def test_body_part_postings_drop_sides(f1_index):
    assert set(f1_index.body_parts) == {"eye", "hand", "hands", "legs"}
    # "left hand" and "right hand" both land under "hand"
    assert len(f1_index.body_parts["hand"]) >= 2


def test_scene_level_postings(f1_index):
    assert f1_index.backgrounds == {"temple": ("sc1", "sc2")}
    assert set(f1_index.costumes) == {"red silk", "blue cotton"}
    assert f1_index.costumes["red silk"] == ("sc1", "sc2")


def test_occurrence_shot_postings(f1, f1_index):
    assert f1_index.occurrence_shots["sh2-da1"] == ("sh2",)
    assert set(f1_index.occurrence_shots) == set(f1.occurrence_ids())


def test_reflexion_and_instrument_postings(f1_index):
    assert set(f1_index.reflexions) == {"excited", "romantic", "joy", "sad"}
    assert set(f1_index.instruments) == {"veena", "mridangam"}
    assert f1_index.instruments["veena"] == ("sh1-da1",)


def test_postings_are_sorted_tuples(f1_index):
    for table in (
        f1_index.dancers,
        f1_index.body_parts,
        f1_index.postures,
        f1_index.reflexions,
        f1_index.instruments,
        f1_index.backgrounds,
        f1_index.costumes,
        f1_index.occurrence_shots,
    ):
        for postings in table.values():
            assert isinstance(postings, tuple)
            assert list(postings) == sorted(postings)


def test_serialization_round_trip_and_determinism(f1, f1_index):
    text = dumps_index(f1_index)
    assert dumps_index(build_index(f1)) == text
    again = loads_index(text)
    assert again == f1_index


def test_save_and_load(tmp_path, f1, f1_index):
    path = tmp_path / "f1.index.json"
    save_index(f1_index, path)
    assert load_index(path, f1) == f1_index


def test_load_against_other_corpus_is_rejected(tmp_path, f1, f1_index):
    path = tmp_path / "f1.index.json"
    save_index(f1_index, path)
    other = doc_to_corpus(small_doc())
    with pytest.raises(IndexMismatchError):
        load_index(path, other)


def test_stale_prebuilt_index_is_rejected(f1, f1_index):
    other = doc_to_corpus(small_doc())
    with pytest.raises(IndexMismatchError):
        IndexedEngine(other, index=f1_index)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("{nope", "line 1"),
        ("[]", "expected an object"),
        ('{"fingerprint": "ab"}', "expected an object"),
    ],
)
def test_format_errors(text, fragment):
    with pytest.raises(IndexFormatError) as err:
        loads_index(text)
    assert fragment in str(err.value)


def structured_index_doc(f1_index) -> dict:
    return json.loads(dumps_index(f1_index))


def test_format_error_on_extra_key(f1_index):
    doc = structured_index_doc(f1_index)
    doc["extra"] = {}
    with pytest.raises(IndexFormatError, match="expected an object"):
        loads_index(json.dumps(doc))


def test_format_error_on_bad_fingerprint_type(f1_index):
    doc = structured_index_doc(f1_index)
    doc["fingerprint"] = 12
    with pytest.raises(IndexFormatError, match="fingerprint"):
        loads_index(json.dumps(doc))


def test_format_error_on_wrong_file_set(f1_index):
    doc = structured_index_doc(f1_index)
    doc["files"].pop("dancers")
    with pytest.raises(IndexFormatError, match="files"):
        loads_index(json.dumps(doc))


def test_format_error_on_non_object_table(f1_index):
    doc = structured_index_doc(f1_index)
    doc["files"]["dancers"] = []
    with pytest.raises(IndexFormatError, match="dancers"):
        loads_index(json.dumps(doc))


def test_format_error_on_bad_postings(f1_index):
    doc = structured_index_doc(f1_index)
    doc["files"]["dancers"]["anitha"] = ["sh1-da1", 7]
    with pytest.raises(IndexFormatError, match="string"):
        loads_index(json.dumps(doc))


def test_shots_of_occurrences(f1, f1_index):
    assert f1_index.shots_of_occurrences(["sh2-da1", "sh5-da1"]) == {"sh2", "sh5"}
    assert f1_index.shots_of_occurrences([]) == set()


def test_medium_corpus_index_round_trips(medium_corpus):
    index = build_index(medium_corpus)
    assert loads_index(dumps_index(index)) == index
    assert set(index.occurrence_shots) == set(medium_corpus.occurrence_ids())
