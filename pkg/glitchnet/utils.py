"""
Utility functions
"""

from __future__ import annotations

from typing import TypeVar

from django.utils.module_loading import import_string

T = TypeVar("T")


def resolve_import(value: str | T) -> T:
    """value can be a concrete object or a string with a dotted path to the object."""
    if not isinstance(value, str):
        return value
    return import_string(value)


def paper_scale_per_class(total: int, classes: int) -> int:
    """Largest uniform per-class count whose total does not exceed the reference corpus size."""
    return total // classes
