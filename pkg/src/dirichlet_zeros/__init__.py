"""Numerics for Dirichlet L-functions: characters, L-values, zero counts,
twisted second moments, mollifiers and the Levinson proportion bound."""

__version__ = "0.1.0"

from .arith import euler_phi, factorize, moebius, phi_star
from .characters import CharacterGroup, DirichletCharacter, enumerate_characters, gauss_sum, root_number
from .lfun import LEvalConfig, L_value, count_density, count_N, count_N0, zero_counts
from .levinson import LevinsonConfig, c_value, optimize, proportion
from .moments import MomentConfig, Mollifier, moment_report
from .specfun import ConvergenceError, PoleError, ShiftPair, log_gamma

__all__ = [
    "CharacterGroup",
    "ConvergenceError",
    "DirichletCharacter",
    "LEvalConfig",
    "L_value",
    "LevinsonConfig",
    "MomentConfig",
    "Mollifier",
    "PoleError",
    "ShiftPair",
    "c_value",
    "count_N",
    "count_N0",
    "count_density",
    "enumerate_characters",
    "euler_phi",
    "factorize",
    "gauss_sum",
    "log_gamma",
    "moebius",
    "moment_report",
    "optimize",
    "phi_star",
    "proportion",
    "root_number",
    "zero_counts",
]
