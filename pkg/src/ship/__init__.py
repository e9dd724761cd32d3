"""Distillation pipeline, experiences meta-base, and retrieval over it."""

__version__ = "0.1.0"
