"""Standard normal CDF and inverse CDF with clamped tails.

Inverse values are clipped to ``[-U_CLAMP, U_CLAMP]`` so that probabilities
that round to 0 or 1 in double precision never produce infinities.
"""

import numpy as np
from scipy.special import ndtr, ndtri

# Collocation designs never need tails beyond this many standard deviations.
U_CLAMP = 8.5


def std_normal_cdf(u):
    """CDF of the standard normal, elementwise."""
    return ndtr(u)


def std_normal_icdf(p):
    """Inverse CDF of the standard normal, clamped to +-U_CLAMP."""
    return np.clip(ndtri(p), -U_CLAMP, U_CLAMP)
