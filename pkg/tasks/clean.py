from pathlib import Path

from invoke import task

ARTIFACTS = ("build", "cache", "test", "tox")


def sweep(c, what: str, paths: list[str]):
    cmd = f"rm -fr {' '.join(paths)}"
    print(f"Cleaning {what} with:\033[0m\n  \033[35m{cmd}\033[0m")
    c.run(cmd)


def sweep_section(c, section: str):
    config = c.config.clean[section]
    sweep(c, config.cleans, config.paths)


@task(name="build")
def clean_build(c):
    """Remove build artifacts"""
    sweep_section(c, "build")


@task(name="cache")
def clean_cache(c):
    """Remove Python file artifacts"""
    sweep_section(c, "cache")


@task(name="test")
def clean_test(c):
    """Remove test and coverage artifacts"""
    sweep_section(c, "test")


@task(name="tox")
def clean_tox(c):
    """Remove tox artifacts"""
    sweep_section(c, "tox")


@task(name="data", help={"keep_corpus": "Keep the generated corpus; drop only checkpoints and training logs."})
def clean_data(c, keep_corpus=False):
    """Remove the experiment directory: corpus, checkpoints and training logs"""
    root = Path(c.config.experiment.dir)
    if keep_corpus:
        sweep(c, "experiment outputs", [str(root / sub) for sub in ("checkpoints", "logs")])
    else:
        sweep(c, "experiment directory", [str(root)])


@task(name="all", help={"data": "Also remove the experiment directory."})
def clean_all(c, data=False):
    """Remove build, test, coverage, tox and Python artifacts [and generated experiment data]"""
    for section in ARTIFACTS:
        sweep_section(c, section)
    if data:
        clean_data(c)
    print("\033[32mAll cleaned up!\033[0m")
