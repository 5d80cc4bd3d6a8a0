__version__ = "0.1.0"


def django_manage():
    """Console-script entry point: run a Django management command under glitchnet's standalone settings."""
    import os
    import sys

    from django.core.management import execute_from_command_line

    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "glitchnet.site_settings")
    execute_from_command_line(sys.argv)
