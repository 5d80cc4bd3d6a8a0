"""
Standalone Django settings for running glitchnet commands outside a host project.

    DJANGO_SETTINGS_MODULE=glitchnet.site_settings python -m django gen_data --out corpus/
"""

import os

SECRET_KEY = os.environ.get("GLITCHNET_SECRET_KEY", "glitchnet-commands-only")

INSTALLED_APPS = [
    "glitchnet",
]

DATABASES = {}

USE_TZ = True

GLITCHNET_PRECISION = os.environ.get("GLITCHNET_PRECISION", "float32")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "%(asctime)s %(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "console": {"class": "logging.StreamHandler", "formatter": "plain"},  # stderr
    },
    "loggers": {
        "glitchnet": {
            "handlers": ["console"],
            "level": os.environ.get("GLITCHNET_LOG_LEVEL", "INFO"),
            "propagate": False,
        },
    },
}
