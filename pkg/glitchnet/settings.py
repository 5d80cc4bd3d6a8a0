"""
Default settings for the glitchnet app.

Provides defaults for all glitchnet settings; override any of them in the Django settings module.
"""

from django.conf import settings

# Numeric precision of every tensor: "float32" for training runs, "float64" for gradient verification.
GLITCHNET_PRECISION = getattr(settings, "GLITCHNET_PRECISION", "float32")

# Height x width of each of the four views.
GLITCHNET_VIEW_SHAPE = tuple(getattr(settings, "GLITCHNET_VIEW_SHAPE", (47, 57)))

# an iterable of GlitchClassSpec or a dotted path to import such an iterable.
GLITCHNET_CLASS_SPECS = getattr(settings, "GLITCHNET_CLASS_SPECS", "glitchnet.glitchgen.DEFAULT_CLASS_SPECS")

# Corpus sizes: samples per class at desk scale, and the total the paper-scale corpus approximates.
GLITCHNET_DESK_PER_CLASS = getattr(settings, "GLITCHNET_DESK_PER_CLASS", 40)
GLITCHNET_PAPER_TOTAL = getattr(settings, "GLITCHNET_PAPER_TOTAL", 7730)

# Training protocol.
GLITCHNET_EPOCHS = getattr(settings, "GLITCHNET_EPOCHS", 130)
GLITCHNET_BATCH_SIZE = getattr(settings, "GLITCHNET_BATCH_SIZE", 30)
GLITCHNET_ADADELTA_RHO = getattr(settings, "GLITCHNET_ADADELTA_RHO", 0.95)
GLITCHNET_ADADELTA_EPS = getattr(settings, "GLITCHNET_ADADELTA_EPS", 1e-6)

# "sum" follows the summed cross-entropy objective; "mean" averages it over each batch.
GLITCHNET_LOSS_REDUCTION = getattr(settings, "GLITCHNET_LOSS_REDUCTION", "sum")

# Uniform noise floor as a fraction of the glitch peak; None keeps each class's own floor.
GLITCHNET_NOISE_FLOOR = getattr(settings, "GLITCHNET_NOISE_FLOOR", None)
