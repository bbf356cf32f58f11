import uuid

import django.utils.timezone
import jsonfield.fields
import model_utils.fields
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='RunManifest',
            fields=[
                ('id', models.AutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('created', model_utils.fields.AutoCreatedField(default=django.utils.timezone.now, editable=False, verbose_name='created')),
                ('modified', model_utils.fields.AutoLastModifiedField(default=django.utils.timezone.now, editable=False, verbose_name='modified')),
                ('uuid', models.UUIDField(default=uuid.uuid4, editable=False, unique=True)),
                ('subcommand', models.CharField(choices=[('ingest', 'ingest'), ('fit', 'fit'), ('generate', 'generate'), ('evaluate', 'evaluate'), ('theory', 'theory'), ('pipeline', 'pipeline')], max_length=32)),
                ('output_dir', models.CharField(blank=True, help_text="Directory holding the run's primary outputs and its manifest.json.", max_length=1024)),
                ('seed', models.BigIntegerField(blank=True, help_text='Seed of the run, when the run draws random numbers.', null=True)),
                ('tool_version', models.CharField(max_length=32)),
                ('config', jsonfield.fields.JSONField(default=dict, help_text='Fully resolved configuration (config file merged with command-line flags).')),
                ('input_digests', jsonfield.fields.JSONField(default=dict, help_text='sha256 digests of the input files, keyed by path.')),
                ('metrics', jsonfield.fields.JSONField(default=dict, help_text='Wall-clock seconds and peak resident memory of the run.')),
            ],
            options={
                'verbose_name': 'Run Manifest',
                'verbose_name_plural': 'Run Manifests',
                'get_latest_by': 'created',
            },
        ),
    ]
