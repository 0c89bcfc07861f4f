"""Inverted files over a corpus.

Eight files make up an index set. Five are keyed by normalized facet terms
and post step-occurrence IDs: dancer name, body part (laterality stripped),
posture, reflexion and instrument name. Two post scene IDs: background name
and costume name. The last maps each occurrence ID to the shot holding it,
which is how occurrence-level intersections land back on shots.

An index set is valid for exactly one corpus state and records the corpus
fingerprint at build time; loading an index against a corpus with a
different fingerprint is refused. Posting lists are sorted and duplicate
free, and serialization is canonical, so building the same corpus twice
yields byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields

from .model import Corpus, corpus_fingerprint
from .normalize import normalize_body_part, normalize_key


class IndexMismatchError(Exception):
    """The index was built from a different corpus state."""


class IndexFormatError(Exception):
    """The index file is not a valid serialized index set."""


_POSTING_FILES = (
    "dancers",
    "body_parts",
    "postures",
    "reflexions",
    "instruments",
    "backgrounds",
    "costumes",
    "occurrence_shots",
)


@dataclass(frozen=True)
class IndexSet:
    """All eight inverted files plus the fingerprint of the source corpus."""

    fingerprint: str
    dancers: dict[str, tuple[str, ...]]
    body_parts: dict[str, tuple[str, ...]]
    postures: dict[str, tuple[str, ...]]
    reflexions: dict[str, tuple[str, ...]]
    instruments: dict[str, tuple[str, ...]]
    backgrounds: dict[str, tuple[str, ...]]
    costumes: dict[str, tuple[str, ...]]
    occurrence_shots: dict[str, tuple[str, ...]]

    def shots_of_occurrences(self, occ_ids) -> set[str]:
        """Resolve occurrence IDs to their shots through the shot file."""
        out: set[str] = set()
        for occ_id in occ_ids:
            out.update(self.occurrence_shots.get(occ_id, ()))
        return out


def build_index(corpus: Corpus) -> IndexSet:
    """Scan the corpus once and build all eight files."""
    dancers: dict[str, set[str]] = {}
    body_parts: dict[str, set[str]] = {}
    postures: dict[str, set[str]] = {}
    reflexions: dict[str, set[str]] = {}
    instruments: dict[str, set[str]] = {}
    backgrounds: dict[str, set[str]] = {}
    costumes: dict[str, set[str]] = {}
    occurrence_shots: dict[str, set[str]] = {}

    def post(table: dict[str, set[str]], key: str, value: str) -> None:
        table.setdefault(key, set()).add(value)

    for shot in corpus.shots.values():
        for occ in shot.occurrences:
            post(dancers, normalize_key(corpus.dancers[occ.dancer_id].name), occ.occ_id)
            post(postures, normalize_key(occ.posture), occ.occ_id)
            post(reflexions, normalize_key(occ.reflexion), occ.occ_id)
            if occ.instrument_id is not None:
                post(
                    instruments,
                    normalize_key(corpus.instruments[occ.instrument_id].name),
                    occ.occ_id,
                )
            for part in corpus.step_defs[occ.step_def_id].body_parts:
                post(body_parts, normalize_body_part(part), occ.occ_id)
            post(occurrence_shots, occ.occ_id, shot.id)

    for scene in corpus.scenes.values():
        post(backgrounds, normalize_key(corpus.backgrounds[scene.background_id].name), scene.id)
        for _dancer_id, costume_ids in scene.costume_map:
            for cid in costume_ids:
                post(costumes, normalize_key(corpus.costumes[cid].name), scene.id)

    def freeze(table: dict[str, set[str]]) -> dict[str, tuple[str, ...]]:
        return {key: tuple(sorted(values)) for key, values in table.items()}

    return IndexSet(
        fingerprint=corpus_fingerprint(corpus),
        dancers=freeze(dancers),
        body_parts=freeze(body_parts),
        postures=freeze(postures),
        reflexions=freeze(reflexions),
        instruments=freeze(instruments),
        backgrounds=freeze(backgrounds),
        costumes=freeze(costumes),
        occurrence_shots=freeze(occurrence_shots),
    )


def dumps_index(index: IndexSet) -> str:
    doc = {
        "fingerprint": index.fingerprint,
        "files": {
            name: {key: list(values) for key, values in getattr(index, name).items()}
            for name in _POSTING_FILES
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def save_index(index: IndexSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_index(index))


def loads_index(text: str) -> IndexSet:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IndexFormatError(f"line {exc.lineno}, col {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict) or set(doc) != {"fingerprint", "files"}:
        raise IndexFormatError("expected an object with 'fingerprint' and 'files'")
    if not isinstance(doc["fingerprint"], str):
        raise IndexFormatError("fingerprint must be a string")
    files = doc["files"]
    if not isinstance(files, dict) or set(files) != set(_POSTING_FILES):
        raise IndexFormatError(f"'files' must hold exactly {sorted(_POSTING_FILES)}")
    tables: dict[str, dict[str, tuple[str, ...]]] = {}
    for name in _POSTING_FILES:
        table = files[name]
        if not isinstance(table, dict):
            raise IndexFormatError(f"files.{name} must be an object")
        frozen: dict[str, tuple[str, ...]] = {}
        for key, values in table.items():
            if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
                raise IndexFormatError(f"files.{name}[{key!r}] must be a string array")
            frozen[key] = tuple(values)
        tables[name] = frozen
    return IndexSet(fingerprint=doc["fingerprint"], **tables)


def load_index(path, corpus: Corpus | None = None) -> IndexSet:
    """Read an index file; when a corpus is supplied, pin it to the index.

    Raises IndexMismatchError if the stored fingerprint does not match the
    corpus, which means the index was built from different data.
    """
    with open(path, encoding="utf-8") as fh:
        index = loads_index(fh.read())
    if corpus is not None and index.fingerprint != corpus_fingerprint(corpus):
        raise IndexMismatchError(
            "index fingerprint does not match the corpus; rebuild the index"
        )
    return index


# fields() sanity: _POSTING_FILES must track the dataclass
assert set(_POSTING_FILES) == {
    f.name for f in fields(IndexSet) if f.name != "fingerprint"
}
