"""
Django settings for the ehrfan project.

The project has no web surface: Django provides the app registry, the
cache framework used as memo store, management commands and the test
runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""

import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Only used by Django internals (signing); nothing here is served.
SECRET_KEY = os.getenv(
    "DJANGO_SECRET_KEY",
    "django-insecure-ehrfan-local-computations-only",
)

DEBUG = False

ALLOWED_HOSTS: list[str] = []


# Application definition

INSTALLED_APPS = [
    "rest_framework",
    "lattice",
    "fans",
    "plfunctions",
    "ehrhart",
    "polytopes",
    "matroids",
    "pering",
    "ehrfan",
]

# No models, no database.
DATABASES: dict = {}

CACHES = {
    "default": {
        "BACKEND": "django.core.cache.backends.locmem.LocMemCache",
        "LOCATION": "ehrfan-default",
    },
    "ehrhart": {
        "BACKEND": "django.core.cache.backends.locmem.LocMemCache",
        "LOCATION": "ehrfan-ehrhart",
        "TIMEOUT": None,
        "OPTIONS": {"MAX_ENTRIES": 500_000, "CULL_FREQUENCY": 10},
    },
}

# Internationalization
# https://docs.djangoproject.com/en/4.2/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# Computation knobs

EHRFAN_LOG_LEVEL = os.getenv("EHRFAN_LOG", "WARNING").upper()

EHRFAN_MAX_SHELLS = 64
EHRFAN_SAMPLE_SEED = 20240521
EHRFAN_POLYNOMIAL_SAMPLES = 6
EHRFAN_SAMPLE_RANGE = 3
EHRFAN_MATROID_SPOT_CHECKS = 32
EHRFAN_MATROID_SEED = 7

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {
            "format": "%(levelname)s %(name)s: %(message)s",
        },
    },
    "handlers": {
        "console": {
            "level": "DEBUG",
            "class": "logging.StreamHandler",
            "formatter": "plain",
        },
    },
    "loggers": {
        "": {
            "handlers": ["console"],
            "level": EHRFAN_LOG_LEVEL,
            "propagate": True,
        },
    },
}
