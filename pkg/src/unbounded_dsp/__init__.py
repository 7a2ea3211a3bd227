"""Filtering, spectral pairing and causal prediction for polynomially growing signals."""
__version__ = "0.1.0"

from .errors import (DivergenceError, NonConvergenceError, NotAMemberError, SaturationWarning,
                     SpectralLeakageWarning, ValidationError)
from .weights import Weight, submultiplicativity_check, weight_eval
from .signals import (SampledSignal, SignalTerm, SymbolicSignal, degeneracy_certificate,
                      eval_signal, in_weighted_space, weighted_sup_norm)
from .kernels import (ExpTail, Kernel, TransferFunction, convolve, convolve_at, ideal_rect_kernel,
                      rho_l1_norm, synthesize_kernel, trapezoid_kernel_closed_form,
                      trapezoid_transfer)
from .filters import (FilterSpec, apply_filter, design_filter, filter_transfer, mu_eval,
                      select_smoothness)
from .spectral import (TestFunction, gap_test, make_bump, pairing, parseval_check,
                       truncated_transform)
from .predictor import (PredictorSpec, anticausal_base_transfer, compensator, predict,
                        predictor_transfer, synthesize_predictor_kernel, v_gamma_profile,
                        vgamma_study)
from ._accel import BACKEND
