from __future__ import annotations

from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class GlitchnetConfig(AppConfig):
    name = "glitchnet"
    verbose_name = _("Multi-view glitch classifiers")
