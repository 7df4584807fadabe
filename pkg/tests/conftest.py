"""Shared fixtures: steady states, spectra grids and the large ensemble run.

Everything expensive is session-scoped so the full suite pays for each
computation once.  The flagship ensemble (10^4 trajectories) takes on the
order of two minutes on one core and is only requested by the tests that
need that statistical weight.
"""

import numpy as np
import pytest

from harmoniccascade import (
    REGIME_PRESETS,
    DriftDiffusion,
    default_omega_grid,
    evaluate_grid,
    lyapunov_covariance,
    require_steady_state,
    run_ensemble,
    spectrum_grid,
    summarize_grid,
)


@pytest.fixture(scope="session")
def regime1():
    return REGIME_PRESETS[1]


@pytest.fixture(scope="session")
def regime2():
    return REGIME_PRESETS[2]


@pytest.fixture(scope="session")
def ss1(regime1):
    return require_steady_state(regime1)


@pytest.fixture(scope="session")
def ss2(regime2):
    return require_steady_state(regime2)


@pytest.fixture(scope="session")
def dd1(regime1, ss1):
    return DriftDiffusion.from_steady_state(regime1, ss1.state)


@pytest.fixture(scope="session")
def dd2(regime2, ss2):
    return DriftDiffusion.from_steady_state(regime2, ss2.state)


@pytest.fixture(scope="session")
def omega_grid():
    return default_omega_grid()


@pytest.fixture(scope="session")
def spectra1(regime1, dd1, omega_grid):
    return spectrum_grid(regime1, dd1, omega_grid)


@pytest.fixture(scope="session")
def spectra2(regime2, dd2, omega_grid):
    return spectrum_grid(regime2, dd2, omega_grid)


@pytest.fixture(scope="session")
def reports1(spectra1):
    return evaluate_grid(spectra1)


@pytest.fixture(scope="session")
def reports2(spectra2):
    return evaluate_grid(spectra2)


@pytest.fixture(scope="session")
def summary1(reports1):
    return summarize_grid(reports1)


@pytest.fixture(scope="session")
def summary2(reports2):
    return summarize_grid(reports2)


@pytest.fixture(scope="session")
def lyap1(dd1):
    return lyapunov_covariance(dd1.a_matrix, dd1.d_matrix)


@pytest.fixture(scope="session")
def lyap2(dd2):
    return lyapunov_covariance(dd2.a_matrix, dd2.d_matrix)


@pytest.fixture(scope="session")
def small_ensemble(regime1):
    # dt coarser than the module default: the dt-halving test in
    # test_stochastic shows the Euler bias sits below one standard error.
    return run_ensemble(regime1, dt=2e-3, t_end=40.0, n_traj=600, seed=7)


@pytest.fixture(scope="session")
def flagship_ensemble(regime1):
    import time

    t0 = time.time()
    moments = run_ensemble(regime1, dt=1e-3, t_end=50.0, n_traj=10_000,
                           seed=20260822)
    return moments, time.time() - t0


def first_order_mean_shift(p, a_matrix, cov):
    """Stationary quantum correction to the mean field, A d = r.

    r collects the second-moment terms of the exact mean equations that the
    semiclassical factorization drops; cov is the stationary fluctuation
    covariance of the interleaved doubled vector.
    """
    r = np.array([
        p.kappa1 * cov[1, 2],
        p.kappa1 * cov[0, 3],
        p.kappa2 * cov[3, 4] - 0.5 * p.kappa1 * cov[0, 0],
        p.kappa2 * cov[2, 5] - 0.5 * p.kappa1 * cov[1, 1],
        -0.5 * p.kappa2 * cov[2, 2],
        -0.5 * p.kappa2 * cov[3, 3],
    ])
    return np.linalg.solve(a_matrix, r)
