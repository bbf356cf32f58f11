from django.apps import AppConfig


class StatsConfig(AppConfig):
    name = 'kg_superficiality.apps.stats'
    label = 'stats'
