from django.apps import AppConfig


class GeneratorConfig(AppConfig):
    name = 'kg_superficiality.apps.generator'
    label = 'generator'
