from django.apps import AppConfig


class CoreConfig(AppConfig):
    name = 'kg_superficiality.apps.core'
    label = 'core'
