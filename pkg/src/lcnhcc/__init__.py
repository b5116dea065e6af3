"""Coordinated-behaviour detection via latent connection networks."""

__version__ = "0.1.0"
