"""
Turning N-Triples into edge streams, sequentially or as byte-range chunks.

Chunks cover whole lines: a chunk owns every line that starts inside its byte
range. Chunk dictionaries are merged in chunk order, which reproduces the ids a
sequential pass assigns (first-appearance order), so the edge stream does not
depend on the number of chunks.
"""
import logging
import os

import numpy as np

from kg_superficiality.apps.core.constants import (
    EDGE_DTYPE,
    EDGE_WIDTH,
    NULL_ENTITY,
)
from kg_superficiality.apps.core.exceptions import IngestError
from kg_superficiality.apps.ingest.dictionaries import IdDictionary
from kg_superficiality.apps.ingest.edge_stream import (
    EdgeStream,
    as_edge_array,
    read_edges,
    write_edges,
)
from kg_superficiality.apps.ingest.ntriples import (
    IngestCounters,
    accept_line,
    decompressed,
    is_gzip,
    iter_lines,
)


logger = logging.getLogger(__name__)

EDGE_BUFFER_ROWS = 1_000_000


class _EdgeBuffer:
    """
    Collects edge rows in Python lists and packs them into numpy blocks.
    """

    def __init__(self):
        self._flat = []
        self._blocks = []

    def append(self, subject_id, relationship_id, object_id):
        self._flat.extend((subject_id, relationship_id, object_id))
        if len(self._flat) >= EDGE_BUFFER_ROWS * EDGE_WIDTH:
            self._flush()

    def _flush(self):
        if self._flat:
            self._blocks.append(np.array(self._flat, dtype=EDGE_DTYPE).reshape(-1, EDGE_WIDTH))
            self._flat = []

    def to_array(self):
        self._flush()
        if not self._blocks:
            return np.empty((0, EDGE_WIDTH), dtype=EDGE_DTYPE)
        return np.concatenate(self._blocks)


def _check_id(entity_id):
    if entity_id >= NULL_ENTITY:
        raise IngestError(f'More than {NULL_ENTITY - 1} entities; the edge stream format cannot hold them')
    return entity_id


def _parse_lines(lines, ingest_filter, entities, relationships, counters):
    buffer = _EdgeBuffer()
    for line in lines:
        triple = accept_line(line, ingest_filter, counters)
        if triple is None:
            continue
        subject_id = _check_id(entities.get_or_add(triple.subject))
        relationship_id = relationships.get_or_add(triple.predicate)
        object_id = _check_id(entities.get_or_add(triple.object))
        buffer.append(subject_id, relationship_id, object_id)
    return buffer.to_array()


def deduplicate(edges):
    """
    Drops exact duplicate rows, keeping first occurrences in stream order.

    Returns:
        (edges, removed count)
    """
    edges = as_edge_array(edges)
    if edges.shape[0] == 0:
        return edges, 0
    _, first = np.unique(edges, axis=0, return_index=True)
    first.sort()
    return edges[first], int(edges.shape[0] - first.shape[0])


def parse_ntriples(stream, ingest_filter, dedup=False, spill_threshold=None, spill_dir=None):
    """
    Parses a binary N-Triples stream (gzip detected by its magic bytes) into an EdgeStream.

    Arguments:
        stream: binary file object.
        ingest_filter (IngestFilter): which facts to keep.
        dedup (bool): drop exact duplicate facts.
    Returns:
        EdgeStream whose ``counters`` hold the ingest counters.
    """
    counters = IngestCounters()
    entities = IdDictionary(spill_threshold, spill_dir, name='entities')
    relationships = IdDictionary(spill_threshold, spill_dir, name='relationships')
    edges = _parse_lines(iter_lines(decompressed(stream)), ingest_filter, entities, relationships, counters)
    if dedup:
        edges, removed = deduplicate(edges)
        counters.duplicates_removed += removed
        counters.facts -= removed
    return EdgeStream(edges, entities, relationships, counters=counters)


def split_byte_ranges(path, parts):
    """
    Splits a file into at most ``parts`` byte ranges that start at line beginnings.

    Gzip input cannot be split; it is read as a single range.
    """
    if is_gzip(path):
        if parts > 1:
            logger.info('%s is gzip-compressed and is parsed as a single chunk', path)
        return [(0, None)]
    size = os.path.getsize(path)
    boundaries = [0]
    with open(path, 'rb') as handle:
        for part in range(1, parts):
            position = size * part // parts
            if position <= boundaries[-1]:
                continue
            handle.seek(position - 1)
            # A boundary sits right after a newline.
            handle.readline()
            position = handle.tell()
            if boundaries[-1] < position < size:
                boundaries.append(position)
    boundaries.append(size)
    return list(zip(boundaries[:-1], boundaries[1:]))


def _iter_range(handle, start, end):
    handle.seek(start)
    while handle.tell() < end:
        line = handle.readline()
        if not line:
            break
        yield line


def parse_chunk(path, start, end, ingest_filter, work_dir, index, spill_threshold=None):
    """
    Parses the lines starting in ``[start, end)`` of ``path`` (the whole file when
    ``end`` is None) and writes the chunk's local edges and dictionaries into ``work_dir``.

    Returns:
        dict: JSON-serialisable description of the chunk files and counters.
    """
    counters = IngestCounters()
    entities = IdDictionary(spill_threshold, work_dir, name=f'chunk-{index}-entities')
    relationships = IdDictionary(spill_threshold, work_dir, name=f'chunk-{index}-relationships')
    try:
        with open(path, 'rb') as handle:
            if end is None:
                lines = iter_lines(decompressed(handle))
            else:
                lines = iter_lines(_iter_range(handle, start, end))
            edges = _parse_lines(lines, ingest_filter, entities, relationships, counters)
    except OSError as exc:
        raise IngestError(f'Cannot read {path}: {exc}') from exc
    payload = {
        'index': index,
        'edges': write_edges(os.path.join(work_dir, f'chunk-{index}.bin'), edges),
        'entities': entities.write(os.path.join(work_dir, f'chunk-{index}-entities.txt')),
        'relationships': relationships.write(os.path.join(work_dir, f'chunk-{index}-relationships.txt')),
        'counters': counters.to_dict(),
    }
    entities.close()
    relationships.close()
    logger.debug('Parsed chunk %d of %s: %s', index, path, payload['counters'])
    return payload


def _local_to_global(keys_path, dictionary):
    with open(keys_path, 'rb') as handle:
        ids = [dictionary.get_or_add(line.rstrip(b'\n')) for line in handle]
    return np.array(ids, dtype=np.int64)


def merge_chunks(payloads, edges_path, dedup=False, spill_threshold=None, spill_dir=None):
    """
    Merges parsed chunks, in chunk order, into one edge stream written to ``edges_path``.

    Returns:
        EdgeStream over the memory-mapped merged edges, with summed counters.
    """
    counters = IngestCounters()
    entities = IdDictionary(spill_threshold, spill_dir, name='entities')
    relationships = IdDictionary(spill_threshold, spill_dir, name='relationships')
    with open(edges_path, 'wb') as output:
        for payload in sorted(payloads, key=lambda item: item['index']):
            counters += IngestCounters.from_dict(payload['counters'])
            local = read_edges(payload['edges'], mmap=False)
            entity_map = _local_to_global(payload['entities'], entities)
            relationship_map = _local_to_global(payload['relationships'], relationships)
            if local.shape[0]:
                merged = np.column_stack((
                    entity_map[local[:, 0]],
                    relationship_map[local[:, 1]],
                    entity_map[local[:, 2]],
                )).astype(EDGE_DTYPE)
                merged.tofile(output)
    if len(entities) >= NULL_ENTITY:
        raise IngestError(f'More than {NULL_ENTITY - 1} entities; the edge stream format cannot hold them')
    if dedup:
        edges, removed = deduplicate(read_edges(edges_path, mmap=False))
        counters.duplicates_removed += removed
        counters.facts -= removed
        write_edges(edges_path, edges)
    edges = read_edges(edges_path)
    return EdgeStream(edges, entities, relationships, counters=counters)
