"""Torsion pairing on elliptic curves over Q and the intrinsic subgroup."""

__version__ = "0.1.0"
