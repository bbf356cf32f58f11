"""
Files written by ``fit`` and read back by ``evaluate``.
"""
import logging
import os

from kg_superficiality.apps.core.constants import (
    CHARACTERISTICS_FILE,
    PROFILES_FILE,
    SUMMARY_FILE,
)
from kg_superficiality.apps.core.exceptions import KgSimError
from kg_superficiality.apps.core.utils import read_json, write_csv, write_json
from kg_superficiality.apps.stats.histograms import (
    GLOBAL,
    DegreeHistogram,
    histogram_file_name,
)
from kg_superficiality.apps.stats.profiles import GraphSummary, RelationshipProfile


logger = logging.getLogger(__name__)

CHARACTERISTICS_HEADER = (
    'role', 'entities', 'facts', 'k_max', 'sigma', 'relationships', 'relationship_entities', 'constraint_holds', 'a',
)


def characteristics_table(summary):
    """
    One row per role: |E|, |F|, k_max, sigma and n, with the n > 1/sigma - 1 check.
    """
    return [
        (
            role,
            values.entities,
            values.facts,
            values.k_max,
            values.sigma,
            summary.relationships,
            values.relationship_entities,
            values.constraint_holds,
            values.a,
        )
        for role, values in sorted(summary.roles.items())
    ]


def write_fit_outputs(out_dir, profiles, summary, histograms_by_role):
    write_json(os.path.join(out_dir, PROFILES_FILE), [profile.to_dict() for profile in profiles])
    write_json(os.path.join(out_dir, SUMMARY_FILE), summary.to_dict())
    write_csv(os.path.join(out_dir, CHARACTERISTICS_FILE), CHARACTERISTICS_HEADER, characteristics_table(summary))
    for role, histograms in histograms_by_role.items():
        for key, histogram in histograms.items():
            histogram.write(os.path.join(out_dir, histogram_file_name(role, key)))
    logger.info('Wrote profiles, summary and histograms of %d relationships to %s', len(profiles), out_dir)


def load_profiles(stats_dir):
    path = os.path.join(stats_dir, PROFILES_FILE)
    try:
        return [RelationshipProfile.from_dict(payload) for payload in read_json(path)]
    except (OSError, ValueError, KeyError) as exc:
        raise KgSimError(f'Cannot read fitted profiles {path}: {exc}') from exc


def load_summary(path_or_dir):
    path = path_or_dir
    if os.path.isdir(path_or_dir):
        path = os.path.join(path_or_dir, SUMMARY_FILE)
    try:
        return GraphSummary.from_dict(read_json(path))
    except (OSError, ValueError, KeyError) as exc:
        raise KgSimError(f'Cannot read graph summary {path}: {exc}') from exc


def load_histogram(stats_dir, role, key=GLOBAL):
    path = os.path.join(stats_dir, histogram_file_name(role, key))
    try:
        return DegreeHistogram.read(path)
    except (OSError, ValueError, KeyError) as exc:
        raise KgSimError(f'Cannot read histogram {path}: {exc}') from exc
