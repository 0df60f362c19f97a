"""Fox H-function evaluation of fractional diffusion kernels."""
from .foxh import HFunctionSpec, EvalResult
from .kernel import KernelParams, SpaceTimePoint, p_eval, p_derivative
from .mittag_leffler import ml_eval

__all__ = ["HFunctionSpec", "EvalResult", "KernelParams", "SpaceTimePoint",
           "p_eval", "p_derivative", "ml_eval"]
__version__ = "0.1.0"
