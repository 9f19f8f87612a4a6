"""Spherical panorama operations: rotation on the sphere, panorama-aware
weights, deformable-offset constraint losses, and segmentation metrics."""

from ._core import (
    aggregate_values,
    compose,
    confusion_matrix,
    evaluate_pair,
    inter_loss,
    intra_loss,
    mirror_offsets,
    rotate_image,
    rotate_labels,
    sdpe_loss,
    weight_rows,
)

__all__ = [
    "aggregate_values",
    "compose",
    "confusion_matrix",
    "evaluate_pair",
    "inter_loss",
    "intra_loss",
    "mirror_offsets",
    "rotate_image",
    "rotate_labels",
    "sdpe_loss",
    "weight_rows",
]
