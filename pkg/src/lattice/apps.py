from django.apps import AppConfig


class LatticeConfig(AppConfig):
    name = "lattice"
    verbose_name = "Integer lattice linear algebra"
