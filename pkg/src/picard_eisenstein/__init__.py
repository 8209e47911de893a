"""Numerical toolkit for generalized Eisenstein series on SL(2, Z[i])\\SL(2, C):
exact Gaussian-integer arithmetic, Wigner matrix coefficients on SU(2),
Hecke L-functions over Z[i], hyperbolic 3-space geometry, two-route series
evaluation, and micro-local pairing asymptotics."""

__version__ = "0.1.0"
