"""Augmented Krylov subspace solvers for discrete ill-posed problems."""

__version__ = "0.1.0"
