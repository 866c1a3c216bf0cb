"""Numerical engine for the first moment of L-values of level-one Maass forms.

Submodules: numkernel (quadrature, summation, tails), specfun (gamma and
Kummer functions), bessel (kernels and their Fourier transforms), arith
(Kloosterman and Gauss sums, characters), zetal (Hurwitz, Lerch, L_delta),
spectral (dataset, L-values, trace formula), explicit (the explicit formula
and its asymptotics) and cli.
"""

__version__ = "0.1.0"
