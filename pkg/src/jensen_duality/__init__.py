"""Numerical toolkit for dual criteria in weighted spaces of holomorphic functions.

Measures and potentials on disks, Blaschke and Nevanlinna quantities, sampled
families of representing and Jensen measures, and the discrete duality between
cone minorants and Jensen measures on grids, solved by a dense simplex.
"""

__version__ = "0.1.0"

from .errors import (ConfigurationError, DomainError, EvaluationError, InvalidTestObject,
                     JensenDualityError, SolverError, ValidationError)
from .geometry import DomainSpec, Kernel, SigmaSpec
from .measures import (Atomic, CircleUniform, Composite, DiskUniform, PoissonCircle,
                       TestFunctionBank, integrate, jensen_check, representing_check)
from .potentials import poisson_jensen, potential_eval, vr_eval
from .sequences import ZeroSequence
from .functions import FiniteBlaschke, Polynomial, RationalPair, nevanlinna_T
from .weights import LogBoundary, PowerRadial, ZeroWeight
from .families import jensen_family, representing_family
from .criteria import (BoundedFlag, BoundReport, blaschke_sup, blaschke_test, nontriviality_test,
                       quotient_test, zero_set_dual_test)
from .lp import LinearProgram, solve, verify_certificates
from .duality import Cone, DualityInstance, build_grid, duality_gap, solve_instance

__all__ = [
    "__version__", "ConfigurationError", "DomainError", "EvaluationError", "InvalidTestObject",
    "JensenDualityError", "SolverError", "ValidationError", "DomainSpec", "Kernel", "SigmaSpec",
    "Atomic", "CircleUniform", "Composite", "DiskUniform", "PoissonCircle", "TestFunctionBank",
    "integrate", "jensen_check", "representing_check", "poisson_jensen", "potential_eval",
    "vr_eval", "ZeroSequence", "FiniteBlaschke", "Polynomial", "RationalPair", "nevanlinna_T",
    "LogBoundary", "PowerRadial", "ZeroWeight", "jensen_family", "representing_family",
    "BoundedFlag", "BoundReport", "blaschke_sup", "blaschke_test", "nontriviality_test",
    "quotient_test", "zero_set_dual_test", "LinearProgram", "solve", "verify_certificates",
    "Cone", "DualityInstance", "build_grid", "duality_gap", "solve_instance",
]
