"""Shared builders for the test modules."""

import math

import numpy as np

from cavity_cz import PhysicalParams, SpectralGrid, make_gaussian


def gaussian_on_own_grid(width, n_points=1024, center=0.0, span_widths=16.0):
    grid = SpectralGrid(center - span_widths * width, center + span_widths * width, n_points)
    return make_gaussian(grid, center, width)


def random_params(rng, n, lo=0.2, hi=5.0, gamma=0.0):
    out = []
    for _ in range(n):
        g, kappa, delta = np.exp(rng.uniform(math.log(lo), math.log(hi), 3))
        out.append(PhysicalParams(g=float(g), kappa=float(kappa), delta=float(delta), gamma=gamma))
    return out


# PASS/FAIL lines from the acceptance suite, printed in the terminal summary
ACCEPTANCE_LINES = []
