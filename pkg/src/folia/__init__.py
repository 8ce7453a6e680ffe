"""Numerical laboratory for leafwise holomorphic functions on foliated bundles over surfaces."""

__version__ = "0.1.0"
