"""
Line-oriented N-Triples reading and the internal-entity filter.

Only entity-to-entity facts of one knowledge graph are kept: a triple survives
when its subject and object are both entities of the graph (IRIs starting with
the entity prefix, or blank nodes) and its object is not a literal.
"""
import gzip
import io
import logging
import re
from dataclasses import dataclass, fields
from typing import FrozenSet, Optional

from kg_superficiality.apps.core.exceptions import IngestError


logger = logging.getLogger(__name__)

GZIP_MAGIC = b'\x1f\x8b'
BLANK_NODE_PREFIX = b'_:'

_IRI = rb'<([^<>"{}|^`\\\s]*)>'
_BLANK = rb'(_:[A-Za-z0-9_][^\s.]*(?:\.[^\s.]+)*)'
_LITERAL = rb'("(?:[^"\\\n\r]|\\.)*"(?:@[A-Za-z]+(?:-[A-Za-z0-9]+)*|\^\^<[^<>\s]*>)?)'
TRIPLE_RE = re.compile(
    rb'^[ \t]*(?:' + _IRI + rb'|' + _BLANK + rb')[ \t]+' + _IRI + rb'[ \t]+(?:'
    + _IRI + rb'|' + _BLANK + rb'|' + _LITERAL + rb')[ \t]*\.[ \t]*(?:#.*)?$'
)

# Object classes
INTERNAL = 'internal'
EXTERNAL = 'external'
LITERAL = 'literal'


@dataclass(frozen=True)
class Triple:
    """
    One parsed fact. ``subject`` and ``predicate`` are IRIs (or a blank node
    label for the subject) without angle brackets; ``object`` is an IRI,
    a blank node label or the literal token as written.
    """
    subject: bytes
    predicate: bytes
    object: bytes
    object_is_literal: bool = False


@dataclass(frozen=True)
class IngestFilter:
    """
    Keeps facts whose subject and object both belong to the graph.
    """
    entity_prefix: str
    keep_predicates: Optional[FrozenSet[str]] = None

    def __post_init__(self):
        object.__setattr__(self, '_prefix', self.entity_prefix.encode('utf-8'))
        allowed = None
        if self.keep_predicates is not None:
            allowed = frozenset(predicate.encode('utf-8') for predicate in self.keep_predicates)
        object.__setattr__(self, '_allowed', allowed)

    def is_entity(self, term):
        return term.startswith(self._prefix) or term.startswith(BLANK_NODE_PREFIX)

    def keeps_predicate(self, predicate):
        return self._allowed is None or predicate in self._allowed

    def classify(self, triple):
        """
        Returns INTERNAL, EXTERNAL or LITERAL for the triple's object side.
        A subject outside the graph makes the whole triple EXTERNAL.
        """
        if triple.object_is_literal:
            return LITERAL
        if self.is_entity(triple.subject) and self.is_entity(triple.object):
            return INTERNAL
        return EXTERNAL

    def to_dict(self):
        return {
            'entity_prefix': self.entity_prefix,
            'keep_predicates': sorted(self.keep_predicates) if self.keep_predicates is not None else None,
        }

    @classmethod
    def from_dict(cls, payload):
        keep = payload.get('keep_predicates')
        return cls(
            entity_prefix=payload['entity_prefix'],
            keep_predicates=frozenset(keep) if keep is not None else None,
        )


@dataclass
class IngestCounters:
    """
    Per-input counters. Merging is associative and commutative, so chunk
    counters can be summed in any order.
    """
    lines: int = 0
    facts: int = 0
    literals_removed: int = 0
    external_removed: int = 0
    predicates_filtered: int = 0
    malformed: int = 0
    duplicates_removed: int = 0

    def __add__(self, other):
        return IngestCounters(**{
            field.name: getattr(self, field.name) + getattr(other, field.name)
            for field in fields(self)
        })

    def to_dict(self):
        return {field.name: getattr(self, field.name) for field in fields(self)}

    @classmethod
    def from_dict(cls, payload):
        return cls(**{field.name: payload.get(field.name, 0) for field in fields(cls)})


def parse_line(line):
    """
    Parses one N-Triples line.

    Returns:
        Triple, or None for blank and comment lines.
    Raises:
        ValueError: the line is not a triple, or is not valid UTF-8.
    """
    stripped = line.strip()
    if not stripped or stripped.startswith(b'#'):
        return None
    # Dictionary files are UTF-8 text; UnicodeDecodeError is a ValueError.
    stripped.decode('utf-8')
    match = TRIPLE_RE.match(stripped)
    if match is None:
        raise ValueError(line)
    subject_iri, subject_blank, predicate, object_iri, object_blank, literal = match.groups()
    if literal is not None:
        return Triple(subject_iri or subject_blank, predicate, literal, object_is_literal=True)
    return Triple(subject_iri or subject_blank, predicate, object_iri or object_blank)


def accept_line(line, ingest_filter, counters):
    """
    Parses and filters one line, updating ``counters``.

    Returns:
        Triple when the line yields a fact, None otherwise.
    """
    counters.lines += 1
    try:
        triple = parse_line(line)
    except ValueError:
        counters.malformed += 1
        return None
    if triple is None:
        return None
    kind = ingest_filter.classify(triple)
    if kind == LITERAL:
        counters.literals_removed += 1
        return None
    if kind == EXTERNAL:
        counters.external_removed += 1
        return None
    if not ingest_filter.keeps_predicate(triple.predicate):
        counters.predicates_filtered += 1
        return None
    counters.facts += 1
    return triple


def is_gzip(path):
    try:
        with open(path, 'rb') as handle:
            return handle.read(2) == GZIP_MAGIC
    except OSError as exc:
        raise IngestError(f'Cannot read {path}: {exc}') from exc


def decompressed(stream):
    """
    Returns a binary stream, transparently gunzipped when it starts with the gzip magic bytes.
    """
    if not hasattr(stream, 'peek'):
        stream = io.BufferedReader(stream)
    try:
        head = stream.peek(2)[:2]
    except OSError as exc:
        raise IngestError(f'Cannot read input stream: {exc}') from exc
    if head == GZIP_MAGIC:
        logger.debug('Input stream is gzip-compressed')
        return gzip.GzipFile(fileobj=stream, mode='rb')
    return stream


def iter_lines(stream):
    """
    Yields the lines of a binary stream, converting read failures into IngestError.
    """
    try:
        yield from stream
    except (OSError, EOFError) as exc:
        raise IngestError(f'Cannot read input stream: {exc}') from exc
