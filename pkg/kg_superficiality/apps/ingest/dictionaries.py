"""
IRI <-> integer dictionaries with dense ids in first-appearance order.

Small dictionaries live in a dict. Past ``spill_threshold`` entries the key to id
index moves into an on-disk SQLite b-tree and keys are appended to a key file
(line number = id), so memory stays bounded on full dumps.
"""
import logging
import os
import sqlite3
import tempfile


logger = logging.getLogger(__name__)

SPILL_BATCH = 10_000


class IdDictionary:
    """
    Assigns dense integer ids to byte-string keys.
    """

    def __init__(self, spill_threshold=None, spill_dir=None, name='dictionary'):
        self.spill_threshold = spill_threshold
        self.spill_dir = spill_dir
        self.name = name
        self._ids = {}
        self._keys = []
        self._size = 0
        self._connection = None
        self._keys_path = None
        self._keys_file = None
        self._pending = 0

    def __len__(self):
        return self._size

    @property
    def spilled(self):
        return self._connection is not None

    def get_or_add(self, key):
        """
        Returns the id of ``key``, assigning the next id when the key is new.
        """
        if self._connection is None:
            key_id = self._ids.get(key)
            if key_id is None:
                key_id = self._size
                self._ids[key] = key_id
                self._keys.append(key)
                self._size += 1
                if self.spill_threshold is not None and self._size >= self.spill_threshold:
                    self._spill()
            return key_id
        row = self._connection.execute('SELECT id FROM terms WHERE key = ?', (key,)).fetchone()
        if row is not None:
            return row[0]
        key_id = self._size
        self._connection.execute('INSERT INTO terms (key, id) VALUES (?, ?)', (key, key_id))
        self._keys_file.write(key + b'\n')
        self._size += 1
        self._pending += 1
        if self._pending >= SPILL_BATCH:
            self._connection.commit()
            self._pending = 0
        return key_id

    def keys(self):
        """
        Yields the keys in id order.
        """
        if self._connection is None:
            yield from self._keys
            return
        self._keys_file.flush()
        with open(self._keys_path, 'rb') as handle:
            for line in handle:
                yield line.rstrip(b'\n')

    def write(self, path):
        """
        Writes one key per line; the line number is the id.
        """
        with open(path, 'wb') as handle:
            for key in self.keys():
                handle.write(key + b'\n')
        return path

    def close(self):
        if self._connection is not None:
            self._connection.close()
            self._keys_file.close()
            self._connection = None

    def _spill(self):
        directory = self.spill_dir or tempfile.gettempdir()
        os.makedirs(directory, exist_ok=True)
        handle, database_path = tempfile.mkstemp(prefix=f'{self.name}-', suffix='.sqlite3', dir=directory)
        os.close(handle)
        self._keys_path = database_path[:-len('.sqlite3')] + '.keys'
        logger.info('Spilling %s with %d entries to %s', self.name, self._size, database_path)
        connection = sqlite3.connect(database_path)
        connection.execute('PRAGMA journal_mode = OFF')
        connection.execute('PRAGMA synchronous = OFF')
        connection.execute('CREATE TABLE terms (key BLOB PRIMARY KEY, id INTEGER NOT NULL) WITHOUT ROWID')
        connection.executemany('INSERT INTO terms (key, id) VALUES (?, ?)', self._ids.items())
        connection.commit()
        self._keys_file = open(self._keys_path, 'wb')  # pylint: disable=consider-using-with
        for key in self._keys:
            self._keys_file.write(key + b'\n')
        self._connection = connection
        self._ids = {}
        self._keys = []


class LabelFile:
    """
    Read-only view of a dictionary file: ``len`` is the line count and
    labels are read lazily.
    """

    def __init__(self, path):
        self.path = path
        self._count = None

    def __len__(self):
        if self._count is None:
            count = 0
            with open(self.path, 'rb') as handle:
                for _ in handle:
                    count += 1
            self._count = count
        return self._count

    def __iter__(self):
        with open(self.path, encoding='utf-8') as handle:
            for line in handle:
                yield line.rstrip('\n')


class SyntheticLabels:
    """
    Labels ``<prefix><id>`` for generated entities and relationships.
    """

    def __init__(self, count, prefix):
        self.count = count
        self.prefix = prefix

    def __len__(self):
        return self.count

    def __iter__(self):
        for index in range(self.count):
            yield f'{self.prefix}{index}'
