"""Matrix multiplicative weights solver for single-coin QMAM games."""

from fractions import Fraction

from . import _core
from ._core import (
    ContractViolation,
    ConvergenceError,
    DimensionError,
    Error,
    FormatError,
    NotHermitianError,
    PreconditionError,
    PromiseViolation,
    ProtocolInstance,
    SdpInstance,
    SolveOutcome,
    SolverConfig,
    ValidationReport,
    apply_soundness_padding,
    assemble,
    bell_planted_yes,
    bracket,
    closed_form_value,
    gen_planted_no,
    gen_planted_yes,
    gen_random,
    inner_product,
    inv_sqrt,
    load_instance,
    matrix_exp,
    optimal_dual_for_planted_no,
    partial_trace,
    phi,
    phi_adjoint,
    positive_projection,
    random_search_lower_bound,
    scalar_instance,
    spectral_decomposition,
    spectral_norm,
    strategy_value,
    tensor,
    validate_certificate_file,
    validate_dual,
    validate_primal,
)

__all__ = [name for name in dir(_core) if not name.startswith("_")] + ["configure", "solve", "constants"]


def configure(sdp, **overrides):
    """Solver configuration; rational overrides accept int, Fraction or "p/q"."""
    return _core.configure(sdp, **overrides)


def solve(sdp, config=None, **overrides):
    if config is None:
        config = configure(sdp, **overrides)
    elif overrides:
        raise TypeError("pass either a config or overrides, not both")
    return _core.solve(sdp, config)


def constants(config):
    """The exact solver constants as Fractions."""
    return {
        "gamma": Fraction(config.gamma),
        "eps": Fraction(config.eps),
        "delta": Fraction(config.delta),
        "mu": Fraction(config.mu),
        "T": config.T,
    }
