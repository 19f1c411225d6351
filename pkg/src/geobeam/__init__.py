"""Fixed-beam multicast GEO satellite massive-MIMO simulator and closed-form bounds."""

__version__ = "0.1.0"

from .analytic import (ScalingParams, density, gaussian_approx_probability, group_size, max_radius,
                       rate_bounds, scaling_fraction, sufficient_interval,
                       theorem1_probability_lower_bound, theorem3_interference_bound)
from .array import BeamConfig, SteeringDirection, beam_gain_closed_form, beam_gain_user, interference_gain
from .geometry import PppConfig, SystemConfig, UserPosition, position_from_polar, sample_ppp
from .montecarlo import (Conditioning, McConfig, Sampler, estimate_event_probability,
                         estimate_interference_probability, estimate_rate, sweep_fraction_vs_q)
from .selection import Policy, SelectionConfig, select
from .special import kummer_1f1_bound_form, regularized_incomplete_gamma

__all__ = [
    "BeamConfig", "Conditioning", "McConfig", "Policy", "PppConfig", "Sampler", "ScalingParams",
    "SelectionConfig", "SteeringDirection", "SystemConfig", "UserPosition",
    "beam_gain_closed_form", "beam_gain_user", "density", "estimate_event_probability",
    "estimate_interference_probability", "estimate_rate", "gaussian_approx_probability",
    "group_size", "interference_gain", "kummer_1f1_bound_form", "max_radius",
    "position_from_polar", "rate_bounds", "regularized_incomplete_gamma", "sample_ppp",
    "scaling_fraction", "select", "sufficient_interval", "sweep_fraction_vs_q",
    "theorem1_probability_lower_bound", "theorem3_interference_bound",
]
