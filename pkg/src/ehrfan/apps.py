from django.apps import AppConfig


class EhrfanConfig(AppConfig):
    name = "ehrfan"
    verbose_name = "Ehrhart fan command line"
