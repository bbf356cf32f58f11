from django.apps import AppConfig


class IngestConfig(AppConfig):
    name = 'kg_superficiality.apps.ingest'
    label = 'ingest'
