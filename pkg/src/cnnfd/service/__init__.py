"""CLI and HTTP surfaces for the deployed surrogate."""

from ..errors import OutOfEnvelopeError
from .predictor import Predictor

__all__ = ["OutOfEnvelopeError", "Predictor"]
