from django.apps import AppConfig


class PERingConfig(AppConfig):
    name = "pering"
    verbose_name = "Piecewise-exponential elements"
