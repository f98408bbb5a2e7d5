"""Weyl transforms, Fourier-Wigner functions and projection-pair estimates.

Submodules: :mod:`numerics`, :mod:`gridsets`, :mod:`hmg`, :mod:`quat`,
:mod:`projection`, :mod:`reports`, :mod:`cli`.
"""

__version__ = "0.1.0"
