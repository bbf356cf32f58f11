"""
Celery tasks of the generator app.
"""
import logging

from celery import shared_task
from celery_utils.logged_task import LoggedTask

from kg_superficiality.apps.generator.engine import RelationshipLog, replay_relationship
from kg_superficiality.apps.ingest.edge_stream import write_edges


logger = logging.getLogger(__name__)


@shared_task(base=LoggedTask, bind=True)
def replay_relationship_task(self, log_path, alphas, seed, edges_path):  # pylint: disable=unused-argument
    """
    Replays one relationship log (Phase 2 of a per-relationship generation) and
    writes the relationship's edges to ``edges_path``.
    """
    edges = replay_relationship(RelationshipLog.load(log_path), alphas, seed)
    return write_edges(edges_path, edges)
