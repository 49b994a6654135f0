"""Essential spectra of 2x2 mixed-order operator systems on the real line.

The pipeline: parse coefficient expressions (:mod:`esspec.expr`), build the
operator matrix (:mod:`esspec.symbols`), verify the ellipticity and
stabilization hypotheses (:mod:`esspec.ellipticity`, :mod:`esspec.schur`),
trace the essential-spectrum curve from the limiting spectral pencil
(:mod:`esspec.spectrum`), and cross-validate against eigenvalues of
discretized truncated-domain operators (:mod:`esspec.validate`).
"""

__version__ = "0.1.0"

from .symbols import (  # noqa: F401
    INFINITY,
    CoeffFn,
    DiffSymbol,
    LimitingMatrix,
    OperatorMatrix,
    Polynomial,
    ValidationError,
    det_M,
    eval_symbol,
    limiting_matrix,
    principal_symbol,
)
