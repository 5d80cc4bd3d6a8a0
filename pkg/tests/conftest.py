from .fixtures import (  # noqa: F401
    corpus_dir,
    float64,
    glitch_corpus,
    glitchnet_settings,
    random_corpus,
    restore_precision,
    tiny_arch,
    tiny_spec,
)
