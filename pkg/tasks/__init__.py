from invoke import Collection

from . import clean, deps, experiment, tox

namespace = Collection(clean, deps, experiment, tox)
