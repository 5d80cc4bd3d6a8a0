from pathlib import Path

from invoke import task

MODELS = ("single0", "single1", "single2", "single3", "parallel", "merged")

get_config = lambda c: c.config.experiment


def manage(c, command: str, *args: str, **kwargs):
    return c.run(f"python manage.py {command} {' '.join(args)}", **kwargs)


def checkpoint_path(c, model: str) -> Path:
    return Path(get_config(c).dir) / "checkpoints" / f"{model}.ckpt"


@task
def data(c, scale=None, seed=None):
    """Generate the experiment corpus"""
    config = get_config(c)
    manage(
        c, "gen_data", f"--out {config.dir}/corpus", f"--scale {scale or config.scale}",
        f"--seed {config.seed if seed is None else seed}", hide="out",
    )


@task(help={"model": "One of single0..single3, parallel, merged; default trains all six."})
def train(c, model=None, epochs=None):
    """Train one model, or all six, on the experiment corpus"""
    config = get_config(c)
    for name in [model] if model else MODELS:
        print(f"\033[35mTraining {name}...\033[0m")
        manage(
            c, "train", f"--data {config.dir}/corpus", f"--model {name}", f"--epochs {epochs or config.epochs}",
            f"--batch {config.batch}", f"--seed {config.seed}", f"--out {checkpoint_path(c, name)}",
            f"--log {config.dir}/logs/{name}.csv",
        )


@task
def evaluate(c, split="test"):
    """Evaluate every trained model"""
    config = get_config(c)
    for name in MODELS:
        if checkpoint_path(c, name).exists():
            manage(c, "eval", f"--ckpt {checkpoint_path(c, name)}", f"--data {config.dir}/corpus", f"--split {split}")


@task
def compare(c, split="test"):
    """Compare every trained model side by side"""
    config = get_config(c)
    ckpts = " ".join(str(checkpoint_path(c, name)) for name in MODELS if checkpoint_path(c, name).exists())
    manage(c, "compare", f"--data {config.dir}/corpus", f"--ckpt {ckpts}", f"--split {split}")


@task(name="all", pre=[data, train], post=[compare])
def run_all(c):
    """Generate data, train all six models and compare them"""
    print("\033[32mExperiment complete.\033[0m")
