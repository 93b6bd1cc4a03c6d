"""Maximal overgroups, base sizes and uniform domination in finite
permutation groups."""

__version__ = "0.1.0"

from unidom.atlas import GroupLoadError, GroupSpec, resolve
from unidom.group import PermGroup
from unidom.kernels import BACKEND
from unidom.perm import Permutation

__all__ = ["BACKEND", "GroupLoadError", "GroupSpec", "PermGroup", "Permutation", "resolve", "__version__"]
