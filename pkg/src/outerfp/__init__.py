"""Deformation-space computations for free products of finite groups and free groups."""
__version__ = "0.1.0"
