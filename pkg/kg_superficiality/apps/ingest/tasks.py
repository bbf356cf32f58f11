"""
Celery tasks of the ingest app.
"""
import logging

from celery import shared_task
from celery_utils.logged_task import LoggedTask

from kg_superficiality.apps.ingest.ntriples import IngestFilter
from kg_superficiality.apps.ingest.parsing import parse_chunk


logger = logging.getLogger(__name__)


@shared_task(base=LoggedTask, bind=True)
def parse_chunk_task(self, path, start, end, filter_payload, work_dir, index, spill_threshold=None):  # pylint: disable=unused-argument
    """
    Parses one byte range of an N-Triples file into chunk files under ``work_dir``.

    Returns:
        dict: chunk file paths and counters (see ``parse_chunk``).
    """
    return parse_chunk(
        path,
        start,
        end,
        IngestFilter.from_dict(filter_payload),
        work_dir,
        index,
        spill_threshold=spill_threshold,
    )
