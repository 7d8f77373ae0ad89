"""Principal quadrature squeezing of coherent light in a Kerr medium."""

__version__ = "0.1.0"

from .approx import ScalingEstimate, s0, s1, s_prime, scaling_law
from .errors import (
    BracketError,
    HPOverflowError,
    KerrDomainError,
    KerrError,
    OracleMismatch,
    PrecisionError,
)
from .fock import FockState, fock_moments, kerr_fock_state, principal_squeezing_fock
from .kerr import (
    KerrPoint,
    MomentSet,
    SqueezeResult,
    kerr_moments,
    principal_squeezing_exact,
    principal_squeezing_from_moments,
    quadrature_variance,
)
from .mpnum import PrecisionPolicy, hp_cosm1, hp_exp, hp_expm1, required_digits
from .optimize import (
    MinimumRecord,
    ScalingFit,
    fit_scaling_exponent,
    minimize_over_r,
    minimize_over_tau,
    scan,
)
