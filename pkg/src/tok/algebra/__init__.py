from .exterior import ExtElement, ext_mul, left_mult, wedge_sign
from .linalg import Matrix, rank_q, smith_normal_form
from .poly import ONE, ZERO, Poly

__all__ = [
    "ExtElement",
    "Matrix",
    "ONE",
    "Poly",
    "ZERO",
    "ext_mul",
    "left_mult",
    "rank_q",
    "smith_normal_form",
    "wedge_sign",
]
