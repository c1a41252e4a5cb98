"""Qubit maps with diagonal unitary/orthogonal symmetry.

Submodules: ``linalg`` (small Hermitian eigensolvers), ``docmap`` (map
parameters, Choi matrices, standard channels), ``classify`` (closed-form
positivity / Schwarz / CP tests), ``pauli`` (Pauli maps and volumes),
``oracle`` (brute-force cross-checks) and ``cli``.
"""
from qmap.docmap import ChoiMatrix, MapParams

__all__ = ["ChoiMatrix", "MapParams"]
__version__ = "0.1.0"
