from django.apps import AppConfig


class PLFunctionsConfig(AppConfig):
    name = "plfunctions"
    verbose_name = "Piecewise-linear functions"
