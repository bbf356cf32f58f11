"""
Helpers shared by the ingest tests.
"""
import os

import numpy as np

from kg_superficiality.apps.core.constants import EDGE_DTYPE
from kg_superficiality.apps.ingest.dictionaries import SyntheticLabels
from kg_superficiality.apps.ingest.edge_stream import EdgeStream


DATA_DIR = os.path.join(os.path.dirname(__file__), 'data')
PREFIX = 'p:'

GOLDEN_10 = os.path.join(DATA_DIR, 'golden_10.nt')
GOLDEN_5 = os.path.join(DATA_DIR, 'golden_5.nt')
GOLDEN_200 = os.path.join(DATA_DIR, 'golden_200.nt')

# Hand counts of golden_200.nt
GOLDEN_200_COUNTS = {
    'lines': 200,
    'facts': 125,
    'literals_removed': 30,
    'external_removed': 25,
    'predicates_filtered': 0,
    'malformed': 10,
    'duplicates_removed': 0,
    'entities': 55,
    'relationships': 5,
}


def make_edge_stream(edges, num_entities=None, num_relationships=None):
    """
    Builds an in-memory EdgeStream from (subject, relationship, object) id triples.
    """
    array = np.array(edges, dtype=EDGE_DTYPE).reshape(-1, 3)
    if num_entities is None:
        endpoints = array[:, [0, 2]]
        num_entities = int(endpoints[endpoints != np.iinfo(EDGE_DTYPE).max].max()) + 1 if array.size else 0
    if num_relationships is None:
        num_relationships = int(array[:, 1].max()) + 1 if array.size else 0
    return EdgeStream(
        array,
        SyntheticLabels(num_entities, 'e'),
        SyntheticLabels(num_relationships, 'r'),
    )
