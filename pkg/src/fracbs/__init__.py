"""Time-fractional Black-Scholes pricing driven by an inverse stable subordinator."""

__version__ = "0.1.0"

from .errors import DomainError, NumericError
from .gbm import QuadSpec, bs_price, semigroup_apply
from .levy import StableIndex
from .mc import mc_price
from .nonlocal_op import nonlocal_apply, pde_residual
from .pricer import Model, frac_delta, frac_gamma, frac_price, price_surface, q_beta
from .renewal import DEFAULT_INTERPRETATION, SojournState, mc_sojourn_price, sojourn_price
from .undershoot import Rng, UndershootLaw, sample_direct, sample_path

__all__ = [
    "DEFAULT_INTERPRETATION", "DomainError", "Model", "NumericError", "QuadSpec", "Rng",
    "SojournState", "StableIndex", "UndershootLaw", "bs_price", "frac_delta", "frac_gamma",
    "frac_price", "mc_price", "mc_sojourn_price", "nonlocal_apply", "pde_residual",
    "price_surface", "q_beta", "sample_direct", "sample_path", "semigroup_apply",
    "sojourn_price", "__version__",
]
