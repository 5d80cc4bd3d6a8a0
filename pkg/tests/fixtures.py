"""
    Test fixtures
"""

import importlib

import pytest
import pytest_django.fixtures

import glitchnet.settings
from glitchnet import tensor
from glitchnet.corpus import export_corpus
from glitchnet.glitchgen import generate_corpus
from glitchnet.models import ModelSpec, build

from .factories import TINY_VIEW_SHAPE, CorpusFactory
from .testapp.glitches import TEST_CLASS_SPECS

TEST_VIEW_SHAPE = (20, 24)

# the shrunk network used for gradient checks and fast training runs
TINY_SIZES = dict(view_shape=TINY_VIEW_SHAPE, classes=3, filters=8, kernel_size=3, hidden=16)


@pytest.fixture(autouse=True)
def restore_precision():
    """Commands switch the process-wide precision mode; put it back after every test."""
    previous = tensor.precision_name()
    yield
    tensor.set_precision(previous)


@pytest.fixture
def float64():
    with tensor.precision("float64"):
        yield


@pytest.fixture(params=["single1", "parallel", "merged"])
def tiny_spec(request):
    return ModelSpec.from_name(request.param, **TINY_SIZES)


@pytest.fixture
def tiny_arch(tiny_spec):
    return build(tiny_spec, seed=3)


@pytest.fixture
def random_corpus():
    """3 classes x 5 random-pixel samples: 9 train, 3 validation, 3 test."""
    return CorpusFactory()


@pytest.fixture(scope="session")
def glitch_corpus():
    """A real (rendered) 3-class corpus on the command-test view shape."""
    return generate_corpus(per_class=8, seed=11, class_specs=TEST_CLASS_SPECS, view_shape=TEST_VIEW_SHAPE)


@pytest.fixture
def corpus_dir(tmp_path, glitch_corpus):
    export_corpus(glitch_corpus, tmp_path / "corpus")
    return tmp_path / "corpus"


class SettingsWrapper(pytest_django.fixtures.SettingsWrapper):
    """Reload glitchnet settings after any change to settings."""

    def __delattr__(self, attr: str) -> None:
        super().__delattr__(attr)
        importlib.reload(glitchnet.settings)

    def __setattr__(self, attr: str, value) -> None:
        super().__setattr__(attr, value)
        importlib.reload(glitchnet.settings)

    def finalize(self) -> None:
        super().finalize()
        importlib.reload(glitchnet.settings)


@pytest.fixture()
def glitchnet_settings():
    """A glitchnet settings object which restores changes after the testrun"""
    wrapper = SettingsWrapper()
    yield wrapper
    wrapper.finalize()
