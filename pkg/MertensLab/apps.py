from django.apps import AppConfig


class MertenslabConfig(AppConfig):
    name = 'MertensLab'
    verbose_name = 'Mertens Lab'
