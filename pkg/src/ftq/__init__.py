"""Coherent information of tensor-power channels and fault-tolerance bounds."""

__version__ = "0.1.0"
