#!/usr/bin/env python
"""Run glitchnet management commands (gen_data, train, eval, predict, compare) from a source checkout."""

from glitchnet import django_manage

if __name__ == "__main__":
    django_manage()
