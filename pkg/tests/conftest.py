import numpy as np
import pytest

from vpaw1d import ModelParams, VpawParams, build_vpaw_setup, solve_spectrum


@pytest.fixture(scope="session")
def model():
    return ModelParams(Z0=10.0, Za=10.0, a=0.4)


@pytest.fixture(scope="session")
def spectrum10(model):
    return solve_spectrum(model, 10)


@pytest.fixture(scope="session")
def setups_n2(model):
    return build_vpaw_setup(model, VpawParams(N=2, d=2, eta=0.1))


def quad_piecewise(f, breakpoints, panels_per=24, n=16):
    """Composite Gauss-Legendre over [b0, b1, ...] split pieces."""
    from vpaw1d.quadrature import composite_nodes
    total = 0.0
    for lo, hi in zip(breakpoints[:-1], breakpoints[1:]):
        if hi - lo < 1e-15:
            continue
        x, w = composite_nodes(lo, hi, panels_per, n)
        total += float(np.sum(w * f(x)))
    return total
