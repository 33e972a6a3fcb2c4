"""LIPC colour algebra and Asplund probing distances.

Images are float arrays of shape (H, W, 3) with intensities in [0, 256).
"""

import json as _json

from ._lipc import (  # noqa: F401
    DataError,
    ModelError,
    SolverError,
    add,
    asplund_map,
    colour_pair_distance,
    correlation_map,
    image_pair_distance,
    load_image,
    marginal_distance,
    match,
    model_matrices,
    run_cli,
    save_image,
    scalar_mul,
    to_transmittance,
)
from ._lipc import synth_scene as _synth_scene


def synth_scene(spec):
    """Synthesise a scene from a scene-spec dict (or JSON string)."""
    return _synth_scene(spec if isinstance(spec, str) else _json.dumps(spec))
