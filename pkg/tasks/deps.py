from invoke import task

# pyproject extras pinned into requirements_dev.txt; the runtime pins (django, numpy, pandas) go to requirements.txt
DEV_EXTRAS = ("test", "format", "lint", "utils")


def pip_compile(c, output_file: str, extras=(), upgrade=False):
    flags = [f"--extra={e}" for e in extras]
    if upgrade:
        flags.append("--upgrade")
    c.run(f"pip-compile --resolver=backtracking {' '.join(flags)} -o {output_file} pyproject.toml")


@task(
    help={
        "dev": "Also pin the test, format, lint and utils extras.",
        "upgrade": "Move every pin to its latest release.",
    }
)
def pin(c, dev=False, upgrade=False):
    """Pin the runtime [and development] dependencies from pyproject.toml"""
    print("Generating requirements files...")
    pip_compile(c, "requirements.txt", upgrade=upgrade)
    if dev:
        pip_compile(c, "requirements_dev.txt", extras=DEV_EXTRAS, upgrade=upgrade)
    print("Done.")


@task
def install(c, dev=False):
    """Sync the environment to the pinned runtime [and development] requirements, then check the app loads"""
    c.run("pip-sync requirements_dev.txt" if dev else "pip-sync requirements.txt")
    check(c)


@task
def check(c):
    """Load the glitchnet app and its settings through Django's system checks"""
    c.run("python manage.py check")
