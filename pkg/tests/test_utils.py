""" Unit tests for glitchnet.utils and the settings layer """

from glitchnet import settings as app_settings
from glitchnet.glitchgen import DEFAULT_CLASS_SPECS
from glitchnet.utils import paper_scale_per_class, resolve_import

from .testapp.glitches import TEST_CLASS_SPECS


def test_resolve_import():
    assert resolve_import("glitchnet.glitchgen.DEFAULT_CLASS_SPECS") is DEFAULT_CLASS_SPECS
    assert resolve_import(TEST_CLASS_SPECS) is TEST_CLASS_SPECS


def test_paper_scale_per_class():
    assert paper_scale_per_class(7730, 20) == 386
    assert paper_scale_per_class(7730, 20) * 20 == 7720


def test_settings_follow_django_settings(glitchnet_settings):
    assert app_settings.GLITCHNET_VIEW_SHAPE == (20, 24)
    assert app_settings.GLITCHNET_EPOCHS == 130
    glitchnet_settings.GLITCHNET_EPOCHS = 5
    assert app_settings.GLITCHNET_EPOCHS == 5
