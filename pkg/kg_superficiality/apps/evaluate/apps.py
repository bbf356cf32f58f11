from django.apps import AppConfig


class EvaluateConfig(AppConfig):
    name = 'kg_superficiality.apps.evaluate'
    label = 'evaluate'
