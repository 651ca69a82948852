from django.apps import AppConfig


class EhrhartConfig(AppConfig):
    name = "ehrhart"
    verbose_name = "Ehrhart polynomials"
