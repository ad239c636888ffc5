"""Toolkit for the projective reflection groups G(r,p,q,n)."""

from .group_core import Group, make_group

__all__ = ["Group", "make_group"]
__version__ = "0.1.0"
