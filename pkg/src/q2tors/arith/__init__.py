"""Exact arithmetic kernel: integers, rationals and polynomials over Q."""
from .integers import factorint, is_probable_prime, squarefree_part
from .ratpoly import RatPoly, poly_disc, resultant
from .factor import factor_poly_Q

__all__ = ["RatPoly", "factor_poly_Q", "factorint", "is_probable_prime", "poly_disc", "resultant", "squarefree_part"]
