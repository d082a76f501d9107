"""Structure, enumeration and sampling of Av(4213,2143) and Av(4213,2413,2143)."""

from .perm import (
    BASIS_D,
    BASIS_H,
    CountTable,
    PatternBasis,
    Permutation,
    avoids_all,
    contains,
    enumerate_class,
    iterate_class,
    parse_perm,
)

__version__ = "0.1.0"
