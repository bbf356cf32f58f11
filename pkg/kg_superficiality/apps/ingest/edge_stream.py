"""
Edge streams: fixed-width little-endian (subject, relationship, object) triples
plus the two dictionary files, shared by ingested and generated graphs.
"""
import logging
import os

import numpy as np
from django.conf import settings

from kg_superficiality.apps.core.constants import (
    EDGE_DTYPE,
    EDGE_WIDTH,
    EDGES_FILE,
    ENTITIES_FILE,
    RELATIONSHIPS_FILE,
)
from kg_superficiality.apps.core.exceptions import IngestError
from kg_superficiality.apps.core.utils import ensure_dir
from kg_superficiality.apps.ingest.dictionaries import IdDictionary, LabelFile


logger = logging.getLogger(__name__)


def as_edge_array(edges):
    """
    Returns ``edges`` as an (F, 3) array of the edge dtype.
    """
    array = np.asarray(edges, dtype=EDGE_DTYPE)
    if array.size == 0:
        return np.empty((0, EDGE_WIDTH), dtype=EDGE_DTYPE)
    return array.reshape(-1, EDGE_WIDTH)


def read_edges(path, mmap=True):
    """
    Reads an edge file, memory-mapped unless ``mmap`` is False.
    """
    try:
        size = os.path.getsize(path)
    except OSError as exc:
        raise IngestError(f'Cannot read edge stream {path}: {exc}') from exc
    row_bytes = EDGE_DTYPE.itemsize * EDGE_WIDTH
    if size % row_bytes:
        raise IngestError(f'{path} is not an edge stream: {size} bytes is not a multiple of {row_bytes}')
    if size == 0:
        return np.empty((0, EDGE_WIDTH), dtype=EDGE_DTYPE)
    if mmap:
        return np.memmap(path, dtype=EDGE_DTYPE, mode='r').reshape(-1, EDGE_WIDTH)
    return np.fromfile(path, dtype=EDGE_DTYPE).reshape(-1, EDGE_WIDTH)


def write_edges(path, edges):
    as_edge_array(edges).tofile(path)
    return path


def _write_labels(path, labels):
    if isinstance(labels, IdDictionary):
        return labels.write(path)
    with open(path, 'w', encoding='utf-8') as handle:
        for label in labels:
            if isinstance(label, bytes):
                label = label.decode('utf-8')
            handle.write(f'{label}\n')
    return path


class EdgeStream:
    """
    The facts of one graph as integer triples, with the entity and relationship
    dictionaries mapping ids back to IRIs.

    ``entities`` and ``relationships`` are sequences of labels whose position is
    the id: an ``IdDictionary`` right after parsing, a ``LabelFile`` after loading,
    ``SyntheticLabels`` for generated graphs.
    """

    def __init__(self, edges, entities, relationships, counters=None):
        self.edges = edges
        self.entities = entities
        self.relationships = relationships
        self.counters = counters

    @property
    def facts(self):
        return int(self.edges.shape[0])

    @property
    def num_entities(self):
        return len(self.entities)

    @property
    def num_relationships(self):
        return len(self.relationships)

    def __len__(self):
        return self.facts

    def iter_blocks(self, block_edges=None):
        """
        Yields consecutive row blocks of at most ``block_edges`` edges.
        """
        block_edges = block_edges or settings.KGSIM_READ_BLOCK_EDGES
        for start in range(0, self.facts, block_edges):
            yield np.asarray(self.edges[start:start + block_edges])

    def save_dictionaries(self, directory):
        ensure_dir(directory)
        _write_labels(os.path.join(directory, ENTITIES_FILE), self.entities)
        _write_labels(os.path.join(directory, RELATIONSHIPS_FILE), self.relationships)
        return directory

    def save(self, directory):
        ensure_dir(directory)
        write_edges(os.path.join(directory, EDGES_FILE), self.edges)
        self.save_dictionaries(directory)
        logger.info(
            'Wrote %d edges, %d entities and %d relationships to %s',
            self.facts, self.num_entities, self.num_relationships, directory,
        )
        return directory

    @classmethod
    def load(cls, directory, mmap=True):
        edges_path = os.path.join(directory, EDGES_FILE)
        if not os.path.isfile(edges_path):
            raise IngestError(f'No {EDGES_FILE} in {directory}')
        entities_path = os.path.join(directory, ENTITIES_FILE)
        relationships_path = os.path.join(directory, RELATIONSHIPS_FILE)
        for path in (entities_path, relationships_path):
            if not os.path.isfile(path):
                raise IngestError(f'Missing dictionary file {path}')
        return cls(
            read_edges(edges_path, mmap=mmap),
            LabelFile(entities_path),
            LabelFile(relationships_path),
        )

    @staticmethod
    def files(directory):
        return [os.path.join(directory, name) for name in (EDGES_FILE, ENTITIES_FILE, RELATIONSHIPS_FILE)]
