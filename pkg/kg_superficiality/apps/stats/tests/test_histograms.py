""" Tests for degree histograms. """
import os
import shutil
import tempfile

import numpy as np
from django.test import TestCase

from kg_superficiality.apps.core.constants import ROLE_IN, ROLE_OUT
from kg_superficiality.apps.ingest.degrees import scan_degrees
from kg_superficiality.apps.ingest.ntriples import IngestFilter
from kg_superficiality.apps.ingest.parsing import parse_ntriples
from kg_superficiality.apps.ingest.tests.utils import (
    GOLDEN_5,
    PREFIX,
    make_edge_stream,
)
from kg_superficiality.apps.stats.histograms import (
    GLOBAL,
    DegreeHistogram,
    build_histograms,
)


class DegreeHistogramTests(TestCase):
    """
    Tests for ``DegreeHistogram`` and ``build_histograms``.
    """

    def test_counts(self):
        histogram = DegreeHistogram.from_degrees([2, 1])
        self.assertEqual(histogram.as_dict(), {1: 1, 2: 1})
        self.assertEqual(histogram.total_entities, 2)
        self.assertEqual(histogram.total_facts, 3)

    def test_all_degree_one(self):
        histogram = DegreeHistogram.from_degrees(np.ones(17, dtype=np.int64))
        self.assertEqual(histogram.as_dict(), {1: 17})

    def test_probabilities_sum_to_one(self):
        histogram = DegreeHistogram.from_degrees(np.random.default_rng(3).zipf(2.2, size=5000))
        self.assertAlmostEqual(histogram.probabilities().sum(), 1.0, places=12)
        self.assertEqual(histogram.total_entities, 5000)

    def test_zero_degrees_are_not_entities(self):
        self.assertEqual(DegreeHistogram.from_degrees([0, 0, 3]).as_dict(), {3: 1})

    def test_probability_of(self):
        histogram = DegreeHistogram.from_mapping({1: 1, 3: 3})
        np.testing.assert_allclose(histogram.probability_of([1, 2, 3, 4]), [0.25, 0, 0.75, 0])

    def test_add(self):
        total = DegreeHistogram.from_mapping({1: 2, 5: 1}) + DegreeHistogram.from_mapping({1: 1, 2: 4})
        self.assertEqual(total.as_dict(), {1: 3, 2: 4, 5: 1})

    def test_golden_histograms(self):
        with open(GOLDEN_5, 'rb') as handle:
            stream = parse_ntriples(handle, IngestFilter(entity_prefix=PREFIX))
        out_histograms = build_histograms(scan_degrees(stream, ROLE_OUT))
        # OUT: r1 A:2 D:1, r2 B:1 C:1; globally A:2 B:1 C:1 D:1
        self.assertEqual(out_histograms[0].as_dict(), {1: 1, 2: 1})
        self.assertEqual(out_histograms[1].as_dict(), {1: 2})
        self.assertEqual(out_histograms[GLOBAL].as_dict(), {1: 3, 2: 1})
        in_histograms = build_histograms(scan_degrees(stream, ROLE_IN))
        # IN: r1 B:2 C:1, r2 C:1 D:1; globally B:2 C:2 D:1
        self.assertEqual(in_histograms[GLOBAL].as_dict(), {1: 1, 2: 2})
        for histograms in (out_histograms, in_histograms):
            self.assertEqual(histograms[GLOBAL].total_facts, stream.facts)

    def test_totals_match_tables(self):
        stream = make_edge_stream([(0, 0, 1), (0, 0, 2), (3, 0, 1), (0, 1, 3)])
        tables = scan_degrees(stream, ROLE_OUT)
        histograms = build_histograms(tables)
        self.assertEqual(histograms[GLOBAL].total_entities, tables.distinct_entities)
        self.assertEqual(histograms[0].total_facts, tables.relationships[0].facts)

    def test_write_and_read(self):
        directory = tempfile.mkdtemp()
        try:
            path = os.path.join(directory, 'hist.csv')
            histogram = DegreeHistogram.from_mapping({1: 5, 2: 2, 10: 1})
            histogram.write(path)
            self.assertEqual(DegreeHistogram.read(path).as_dict(), histogram.as_dict())
            with open(path, encoding='utf-8') as handle:
                self.assertEqual(handle.readline().strip(), 'degree,count,probability')
        finally:
            shutil.rmtree(directory)
