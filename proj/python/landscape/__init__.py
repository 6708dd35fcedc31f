"""Spurious-minimum constructions and image geometry for small feedforward nets."""

from ._landscape import (
    IoError,
    PreconditionError,
    SearchError,
    best_affine,
    best_constant,
    check_local_min,
    construct,
    find_escape,
    forward,
    monotone_distance,
    project,
    run,
    sample_image,
    space_fill_eval,
)

__all__ = [
    "IoError",
    "PreconditionError",
    "SearchError",
    "best_affine",
    "best_constant",
    "check_local_min",
    "construct",
    "find_escape",
    "forward",
    "monotone_distance",
    "project",
    "run",
    "sample_image",
    "space_fill_eval",
]
