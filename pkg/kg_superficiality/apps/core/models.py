""" Core models. """
import collections
from logging import getLogger
from uuid import uuid4

from django.db import DatabaseError, models
from jsonfield.encoder import JSONEncoder
from jsonfield.fields import JSONField
from model_utils.models import TimeStampedModel

from kg_superficiality.apps.core.constants import SUBCOMMAND_CHOICES


LOGGER = getLogger(__name__)


class RunManifest(TimeStampedModel):
    """
    Stores the manifest of one subcommand run, mirroring the ``manifest.json``
    written to the run's output directory.

    .. no_pii:
    """

    uuid = models.UUIDField(
        unique=True,
        default=uuid4,
        editable=False,
    )
    subcommand = models.CharField(
        max_length=32,
        choices=SUBCOMMAND_CHOICES,
    )
    output_dir = models.CharField(
        max_length=1024,
        blank=True,
        help_text="Directory holding the run's primary outputs and its manifest.json.",
    )
    seed = models.BigIntegerField(
        null=True,
        blank=True,
        help_text='Seed of the run, when the run draws random numbers.',
    )
    tool_version = models.CharField(
        max_length=32,
    )
    config = JSONField(
        default=dict,
        load_kwargs={'object_pairs_hook': collections.OrderedDict},
        dump_kwargs={'indent': 4, 'cls': JSONEncoder, 'separators': (',', ':')},
        help_text='Fully resolved configuration (config file merged with command-line flags).',
    )
    input_digests = JSONField(
        default=dict,
        dump_kwargs={'cls': JSONEncoder, 'separators': (',', ':')},
        help_text='sha256 digests of the input files, keyed by path.',
    )
    metrics = JSONField(
        default=dict,
        dump_kwargs={'cls': JSONEncoder, 'separators': (',', ':')},
        help_text='Wall-clock seconds and peak resident memory of the run.',
    )

    class Meta:
        verbose_name = 'Run Manifest'
        verbose_name_plural = 'Run Manifests'
        app_label = 'core'
        get_latest_by = 'created'

    @classmethod
    def record(cls, manifest, output_dir=''):
        """
        Stores a manifest dict; returns None when the database is unavailable.
        """
        try:
            return cls.objects.create(
                subcommand=manifest['subcommand'],
                output_dir=output_dir or '',
                seed=manifest.get('seed'),
                tool_version=manifest['tool_version'],
                config=manifest['config'],
                input_digests=manifest.get('input_digests', {}),
                metrics=manifest.get('metrics', {}),
            )
        except DatabaseError:
            LOGGER.warning(
                'Could not record the %s run in the database (run `manage.py migrate`); '
                'manifest.json is still written.',
                manifest['subcommand'],
            )
            return None

    def __str__(self):
        """
        Return human-readable string representation.
        """
        return "<RunManifest {subcommand} '{uuid}' in '{output_dir}'>".format(
            subcommand=self.subcommand,
            uuid=self.uuid,
            output_dir=self.output_dir,
        )
