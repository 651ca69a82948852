from django.apps import AppConfig


class MatroidsConfig(AppConfig):
    name = "matroids"
    verbose_name = "Matroids and Bergman fans"
