# Copyright 2026 The vovit Authors
# License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
"""Two-stage audio-visual voice separation (C++ core)."""

from ._core import (  # noqa: F401
    VovitError,
    SAMPLE_RATE,
    bound_mask,
    chirp,
    evaluate,
    gradcheck,
    harmonic_tone,
    ideal_binary_mask,
    ideal_complex_mask,
    init_weights,
    istft,
    kabsch,
    make_mixture,
    micro_overfit,
    oracle_separate,
    penalty_weights,
    preset_config,
    separate,
    stage1_loss,
    stft,
    summarize,
    talking_face,
    weights_checksum,
)

__all__ = [name for name in dir() if not name.startswith("_")]
