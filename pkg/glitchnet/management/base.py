"""
Shared plumbing for glitchnet management commands.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from functools import wraps
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from glitchnet import settings as app_settings
from glitchnet import tensor
from glitchnet.exceptions import GlitchnetError

logger = logging.getLogger(__name__)


def translate_errors(handle):
    """A handle() decorator that reports glitchnet and I/O failures as one-line CommandErrors."""

    @wraps(handle)
    def wrapper(self, *args, **options):
        try:
            return handle(self, *args, **options)
        except (GlitchnetError, OSError) as e:
            logger.debug("command failed", exc_info=True)
            raise CommandError(f"{type(e).__name__}: {e}") from e

    return wrapper


class GlitchnetCommand(BaseCommand):
    """Base command: no system checks, a --precision option, and CSV output to stdout or a file."""

    requires_system_checks = []

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.add_argument(
            "--precision",
            choices=sorted(tensor.PRECISIONS),
            default=None,
            help="Tensor precision for this run (default: GLITCHNET_PRECISION setting).",
        )
        return parser

    def execute(self, *args, **options):
        tensor.set_precision(options.get("precision") or app_settings.GLITCHNET_PRECISION)
        return super().execute(*args, **options)

    def write_csv(self, text: str, path: Path | None = None):
        if path is None:
            self.stdout.write(text, ending="")
        else:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")

    @contextmanager
    def csv_stream(self, path: Path | None = None) -> Iterator[Callable[[str], None]]:
        """Yield a writer that appends CSV text to stdout or ``path`` and flushes after every call."""
        if path is None:
            def write(text):
                self.stdout.write(text, ending="")
                self.stdout.flush()

            yield write
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as stream:
            def write(text):
                stream.write(text)
                stream.flush()

            yield write
