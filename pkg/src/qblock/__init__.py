"""Blocking sets of lines (and of t-spaces) in finite projective spaces."""

from .bounds import coefficient_sequence, f_opt, f_star, k_star
from .constructions import LineSet, explicit_st, improved_21, spread, trivial_21
from .gfq import FieldSpec, field_make
from .pgspace import Subspace, canonicalize, gaussian_binomial
from .verifier import degree_profile, is_blocking, restrict

__version__ = "0.1.0"
