"""scope-refine: on-the-fly input refinement for code classifiers.

Detects inputs a classifier is likely to mispredict, rewrites them with
semantic-preserving transformations, and searches for the variant the model
handles best, all at inference time and without retraining.
"""

__version__ = "0.1.0"
