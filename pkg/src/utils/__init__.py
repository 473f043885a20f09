"""Configuration, file formats, logging helpers and errors."""

from .errors import PenlossError

__all__ = ["PenlossError"]
