"""Coupled two-way flow on toy point clouds.

A single dense network carries data one way (noise -> points) and labels the
other (codes -> noise). Integrating it forward generates class-conditional
samples; integrating it backward recovers the label code of an observed point.
"""

from biflow._core import (
    Model,
    bayes_classify,
    classify,
    generate,
    mmd2,
    model_from_text,
    sweep,
    train,
    two_spirals,
)

__all__ = [
    "Model",
    "bayes_classify",
    "classify",
    "generate",
    "mmd2",
    "model_from_text",
    "sweep",
    "train",
    "two_spirals",
]
