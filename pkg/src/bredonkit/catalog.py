"""Named groups and encoded classifying complexes shipped with the package.

Finite names resolve to permutation groups; ``Cn`` patterns (C2, C3, ...)
build cyclic groups of any order.  The two infinite entries, ``Dinf`` and
``C2*C3``, resolve to encoded cell complexes bundled as JSON data files,
each carrying its own coefficient battery.
"""

from __future__ import annotations

import os
import re

from .bredon import EncodedComplex, load_complex
from .errors import ParseError
from .grp import Group, group_from_generators

_DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

_FINITE = {
    "S3": ["(1 2)", "(1 2 3)"],
    "S4": ["(1 2)", "(1 2 3 4)"],
    "A4": ["(1 2 3)", "(2 3 4)"],
    "D8": ["(1 2 3 4)", "(1 3)"],
    "Q8": ["(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 8 4 6)"],
    "V4": ["(1 2)(3 4)", "(1 3)(2 4)"],
}

_ENCODED_FILES = {
    "Dinf": "dinf.json",
    "C2*C3": "c2c3.json",
}

_group_cache = {}
_complex_cache = {}


def catalog_names():
    """All resolvable names; Cn stands for the cyclic family."""
    return sorted(_FINITE) + ["Cn"] + sorted(_ENCODED_FILES)


def is_encoded_name(name: str) -> bool:
    return name in _ENCODED_FILES


def catalog_group(name: str, bound: int = None) -> Group:
    """A shipped finite group by name.

    >>> catalog_group("S4").order
    24
    >>> catalog_group("C6").order
    6
    """
    if name in _group_cache:
        return _group_cache[name]
    if name in _FINITE:
        group = group_from_generators(_FINITE[name], bound=bound, name=name)
    else:
        m = re.fullmatch(r"C(\d+)", name)
        if not m or int(m.group(1)) < 2:
            raise ParseError(f"unknown catalog group {name!r}")
        n = int(m.group(1))
        cycle = "(" + " ".join(str(i) for i in range(1, n + 1)) + ")"
        group = group_from_generators([cycle], bound=bound, name=name)
    _group_cache[name] = group
    return group


def catalog_complex(name: str) -> EncodedComplex:
    """A shipped encoded classifying complex by name."""
    if name in _complex_cache:
        return _complex_cache[name]
    if name not in _ENCODED_FILES:
        raise ParseError(f"unknown catalog complex {name!r}")
    complex_ = load_complex(os.path.join(_DATA_DIR, _ENCODED_FILES[name]))
    _complex_cache[name] = complex_
    return complex_


def catalog_entry(name: str):
    """Resolve a catalog name to ("finite", Group) or ("encoded", EncodedComplex)."""
    if name in _ENCODED_FILES:
        return ("encoded", catalog_complex(name))
    return ("finite", catalog_group(name))
