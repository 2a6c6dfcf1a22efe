"""Spectral statistics of circulant Cayley graphs on Z/nZ."""

__version__ = "0.1.0"

from .core import CayleySpec, GeneratorTuple, count_tuples, enumerate_tuples, make_tuple
from .density import conv_mass, conv_mass_mc
from .errors import BudgetExceeded, CayleyError, ToleranceNotMet, ValidationError
from .ihara import ihara_polynomial, pole_pair, ramanujan_fraction, zeta_inverse
from .lattice import RegionSpec, count_lattice
from .spectra import interval_map, spectrum, tau
from .stats import (
    audit_lemma,
    convergence_experiment,
    count_doubleprime,
    count_slice,
    eigen_histogram,
    prob_exact,
    prob_fast,
)

__all__ = [
    "BudgetExceeded", "CayleyError", "CayleySpec", "GeneratorTuple", "RegionSpec",
    "ToleranceNotMet", "ValidationError", "audit_lemma", "conv_mass", "conv_mass_mc",
    "convergence_experiment", "count_doubleprime", "count_lattice", "count_slice",
    "count_tuples", "eigen_histogram", "enumerate_tuples", "ihara_polynomial",
    "interval_map", "make_tuple", "pole_pair", "prob_exact", "prob_fast",
    "ramanujan_fraction", "spectrum", "tau", "zeta_inverse",
]
