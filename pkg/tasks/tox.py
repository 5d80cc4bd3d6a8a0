from pathlib import Path

from invoke import task


@task(help={"keyword": "Only run tests matching this pytest -k expression."})
def test(ctx, keyword=None):
    """Run the fast test suite in the test environments"""
    ctx.run(f"tox r -m test -- -k '{keyword}'" if keyword else "tox r -m test")


@task
def gradients(ctx):
    """Run only the finite-difference gradient checks"""
    test(ctx, keyword="gradients")


@task
def slow(ctx):
    """Run the long learnability and accuracy-trend acceptance tests"""
    ctx.run("tox r slow")


@task(aliases=("cov",))
def coverage(ctx):
    ctx.run("tox r coverage")


@task
def static(ctx):
    """Run the format and lint environments"""
    ctx.run("tox r -m static")


@task(aliases=("devenv",))
def venv(c, dir_name=".venv", force=False):
    """Create the development virtualenv from the tox `dev` environment"""
    if not force and Path(dir_name).exists():
        choice = input(f"The directory `{dir_name}` already exists. Would you like to overwrite it? [y/N]\n")
        if choice.lower() != "y":
            return
    c.run(f"tox d -e dev {dir_name}")
