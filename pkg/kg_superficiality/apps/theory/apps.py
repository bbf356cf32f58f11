from django.apps import AppConfig


class TheoryConfig(AppConfig):
    name = 'kg_superficiality.apps.theory'
    label = 'theory'
