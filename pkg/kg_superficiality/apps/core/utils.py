"""
Utility functions shared by the kg_superficiality apps.
"""
import csv
import hashlib
import json
import os
from logging import getLogger

import numpy as np
from django.utils import timezone

from kg_superficiality.apps.core.constants import FLOAT_FORMAT


LOGGER = getLogger(__name__)

DIGEST_CHUNK_BYTES = 1 << 20


def localized_utcnow():
    """Helper function to return an aware utcnow()."""
    return timezone.now()


def ensure_dir(path):
    """
    Creates ``path`` (and parents) if needed and returns it.
    """
    os.makedirs(path, exist_ok=True)
    return path


def format_value(value):
    """
    Formats a CSV cell; floats keep 17 significant digits so golden files are stable.
    """
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_csv(path, header, rows):
    """
    Writes ``rows`` under ``header`` to ``path``, or to ``path`` itself when it is a file object.
    """
    def _write(handle):
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(value) for value in row])

    if hasattr(path, 'write'):
        _write(path)
        return None
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        _write(handle)
    return path


def read_csv(path):
    """
    Returns the rows of a CSV file as a list of dicts.
    """
    with open(path, encoding='utf-8', newline='') as handle:
        return list(csv.DictReader(handle))


def _json_default(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f'{type(value).__name__} is not JSON serializable')


def write_json(path, payload):
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(payload, handle, indent=2, sort_keys=True, default=_json_default)
        handle.write('\n')
    return path


def read_json(path):
    with open(path, encoding='utf-8') as handle:
        return json.load(handle)


def file_digest(path):
    """
    Returns the sha256 hex digest of a file, read in 1 MiB chunks.
    """
    digest = hashlib.sha256()
    with open(path, 'rb') as handle:
        for chunk in iter(lambda: handle.read(DIGEST_CHUNK_BYTES), b''):
            digest.update(chunk)
    return digest.hexdigest()

