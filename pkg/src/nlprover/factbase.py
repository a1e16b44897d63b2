"""Immutable fact store built from semi-structured relational tables.

Two input formats feed the store:

* table files: tab-separated, first line is the header. A header cell
  ``[NAME]`` declares a content column, ``<some text>`` declares a fill
  column whose literal text is the fill string. Each later line is one
  row with exactly one cell per column (cells may be empty).
* plain fact files: one sentence per line, recorded with EXTERNAL
  provenance.

Row cells joined left to right render the fact sentence; the column
structure of a table also yields one masked infilling template used to
steer premise generation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    DataError,
    EmptyFactbaseError,
    EmptyRowError,
    MalformedTableError,
    MalformedTemplateError,
)

MASK = "<mask>"

CONTENT = "content"
FILL = "fill"

EXTERNAL_SOURCE = "EXTERNAL"

_HEADER_CONTENT_RE = re.compile(r"^\[(.+)\]$")
_HEADER_FILL_RE = re.compile(r"^<(.+)>$")


def read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def normalize(sentence: str) -> str:
    """Canonical dedup key: lowercase, collapse whitespace, strip, and
    drop one trailing sentence-final period."""
    out = " ".join(sentence.lower().split())
    if out.endswith("."):
        out = out[:-1]
    return out.strip()


@dataclass(frozen=True)
class Column:
    header: str
    kind: str  # CONTENT | FILL


@dataclass(frozen=True)
class RelationTable:
    name: str
    columns: tuple[Column, ...]
    rows: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class Fact:
    id: str
    sentence: str
    source: str  # "<table>#<row>" or EXTERNAL
    normalized: str


@dataclass(frozen=True)
class InfillTemplate:
    """Masked sentence pattern; a bare mask token is the empty template."""

    pattern: str
    source_relation: str | None = None
    support_count: int = 0

    @property
    def is_empty(self) -> bool:
        return self.pattern == MASK


EMPTY_TEMPLATE = InfillTemplate(MASK)


def template_regex(pattern: str) -> re.Pattern:
    """Compile a template into a wildcard matcher: each mask accepts any
    non-empty text span. Matching is whitespace-collapsed and
    case-insensitive."""
    parts = " ".join(pattern.split()).split(MASK)
    body = "(.+)".join(re.escape(part.strip()) if part.strip() else "" for part in parts)
    return re.compile(f"^\\s*{body}\\s*$", re.IGNORECASE)


def matches_template(sentence: str, pattern: str) -> bool:
    return template_regex(pattern).match(" ".join(sentence.split())) is not None


@dataclass
class IngestStats:
    files: int = 0
    tables: int = 0
    rows_seen: int = 0
    empty_rows: int = 0
    duplicates: int = 0


@dataclass(frozen=True)
class Factbase:
    """Ordered, deduplicated fact store; immutable after ingest."""

    facts: tuple[Fact, ...]
    by_id: dict[str, Fact] = field(repr=False)
    normalized_keys: frozenset[str] = field(repr=False)
    ingest_stats: IngestStats = field(default_factory=IngestStats, repr=False)

    def __len__(self) -> int:
        return len(self.facts)

    def __contains__(self, fact_id: str) -> bool:
        return fact_id in self.by_id

    def sentence(self, fact_id: str) -> str:
        return self.by_id[fact_id].sentence

    def has_sentence(self, sentence: str) -> bool:
        return normalize(sentence) in self.normalized_keys

    @classmethod
    def from_facts(cls, facts: Iterable[Fact], stats: IngestStats | None = None) -> "Factbase":
        kept: list[Fact] = []
        by_id: dict[str, Fact] = {}
        seen: set[str] = set()
        stats = stats or IngestStats()
        for fact in facts:
            if fact.normalized in seen:
                stats.duplicates += 1
                continue
            if fact.id in by_id:
                raise MalformedTableError(f"duplicate fact id {fact.id!r}")
            kept.append(fact)
            by_id[fact.id] = fact
            seen.add(fact.normalized)
        if not kept:
            raise EmptyFactbaseError("ingest produced zero facts")
        return cls(facts=tuple(kept), by_id=by_id, normalized_keys=frozenset(seen), ingest_stats=stats)


def render_row(table: RelationTable, row_index: int) -> str:
    """Join the row's non-empty cells with single spaces."""
    cells = table.rows[row_index]
    parts = [cell.strip() for cell in cells if cell.strip()]
    if not parts:
        raise EmptyRowError(f"{table.name} row {row_index} has no content")
    return " ".join(parts).strip()


def extract_templates(table: RelationTable) -> InfillTemplate:
    """Derive the table's infilling template: content columns become mask
    tokens, fill headers stay verbatim, adjacent masks merge into one."""
    if not any(col.kind == CONTENT for col in table.columns):
        raise MalformedTableError(f"table {table.name!r} has no content column")
    tokens: list[str] = []
    for col in table.columns:
        piece = MASK if col.kind == CONTENT else col.header
        if piece == MASK and tokens and tokens[-1] == MASK:
            continue
        tokens.append(piece)
    pattern = " ".join(" ".join(tokens).split())
    return InfillTemplate(pattern=pattern, source_relation=table.name)


def parse_table_file(path: str | Path) -> RelationTable:
    """Parse one tab-separated table document."""
    path = Path(path)
    lines = read_text(path).splitlines()
    if not lines or not lines[0].strip():
        raise MalformedTableError("missing header line", path=str(path), line=1)
    columns: list[Column] = []
    for cell in lines[0].split("\t"):
        cell = cell.strip()
        if m := _HEADER_CONTENT_RE.match(cell):
            columns.append(Column(header=m.group(1), kind=CONTENT))
        elif m := _HEADER_FILL_RE.match(cell):
            columns.append(Column(header=m.group(1), kind=FILL))
        else:
            raise MalformedTableError(
                f"header cell {cell!r} is neither [CONTENT] nor <fill>", path=str(path), line=1
            )
    if not any(col.kind == CONTENT for col in columns):
        raise MalformedTableError("table has no content column", path=str(path), line=1)
    rows: list[tuple[str, ...]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split("\t")
        if len(cells) != len(columns):
            raise MalformedTableError(
                f"ragged row: {len(cells)} cells for {len(columns)} columns",
                path=str(path),
                line=lineno,
            )
        rows.append(tuple(cells))
    return RelationTable(name=path.stem, columns=tuple(columns), rows=tuple(rows))


def looks_like_table(path: str | Path) -> bool:
    """A document is treated as a table when its first line contains any
    [X] or <x> header cell; everything else is read one sentence per
    line. A table-intended file with a half-broken header therefore still
    reaches the strict parser and fails loudly."""
    try:
        first = read_text(path).splitlines()[0]
    except IndexError:
        return False
    cells = [c.strip() for c in first.split("\t")]
    return any(_HEADER_CONTENT_RE.match(c) or _HEADER_FILL_RE.match(c) for c in cells)


def _facts_from_table(table: RelationTable, stats: IngestStats) -> list[Fact]:
    facts = []
    for i in range(len(table.rows)):
        stats.rows_seen += 1
        try:
            sentence = render_row(table, i)
        except EmptyRowError:
            stats.empty_rows += 1
            continue
        facts.append(
            Fact(
                id=f"{table.name}#{i}",
                sentence=sentence,
                source=f"{table.name}#{i}",
                normalized=normalize(sentence),
            )
        )
    return facts


def _facts_from_plain_file(path: Path, stats: IngestStats) -> list[Fact]:
    facts = []
    for i, line in enumerate(read_text(path).splitlines()):
        sentence = line.strip()
        if not sentence:
            continue
        stats.rows_seen += 1
        facts.append(
            Fact(
                id=f"{path.stem}#{i}",
                sentence=sentence,
                source=EXTERNAL_SOURCE,
                normalized=normalize(sentence),
            )
        )
    return facts


def ingest_tables(table_files: Sequence[str | Path]) -> Factbase:
    """Build a factbase from table and plain-sentence documents.

    Duplicate normalized sentences keep the first occurrence; zero
    resulting facts is an error.
    """
    stats = IngestStats()
    facts: list[Fact] = []
    table_names: set[str] = set()
    for raw in table_files:
        path = Path(raw)
        stats.files += 1
        if looks_like_table(path):
            table = parse_table_file(path)
            if table.name in table_names:
                raise MalformedTableError(f"duplicate table name {table.name!r}", path=str(path), line=1)
            table_names.add(table.name)
            stats.tables += 1
            facts.extend(_facts_from_table(table, stats))
        else:
            facts.extend(_facts_from_plain_file(path, stats))
    return Factbase.from_facts(facts, stats)


def load_templates(file: str | Path) -> list[InfillTemplate]:
    """Read one template pattern per line, optional tab-separated integer
    support count. Preserves file order."""
    path = Path(file)
    templates: list[InfillTemplate] = []
    for lineno, line in enumerate(read_text(path).splitlines(), start=1):
        if not line.strip():
            continue
        pattern, _, count_text = line.partition("\t")
        pattern = pattern.strip()
        if MASK not in pattern:
            raise MalformedTemplateError(
                f"pattern {pattern!r} has no {MASK} token", path=str(path), line=lineno
            )
        support = 0
        if count_text.strip():
            try:
                support = int(count_text.strip())
            except ValueError:
                raise MalformedTemplateError(
                    f"bad support count {count_text.strip()!r}", path=str(path), line=lineno
                ) from None
            if support < 0:
                raise MalformedTemplateError(
                    f"negative support count {support}", path=str(path), line=lineno
                )
        templates.append(InfillTemplate(pattern=pattern, support_count=support))
    return templates
