"""Exact densities of automatic sequences along the naturals, primes, squares
and coprime residue classes."""

from .dfao import Dfao, evaluate, load_dfao, parse_dfao, serialize_dfao
from .subseq import NATURALS, PRIMES, SQUARES, SubsequenceKind, coprime

__version__ = "0.1.0"

__all__ = ["Dfao", "evaluate", "load_dfao", "parse_dfao", "serialize_dfao",
           "SubsequenceKind", "NATURALS", "PRIMES", "SQUARES", "coprime"]
