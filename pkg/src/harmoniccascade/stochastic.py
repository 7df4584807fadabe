"""Ensemble integrator for the full doubled-phase-space stochastic equations.

Each mode contributes an independent pair (alpha_i, alpha_i_plus); noise
enters the first two modes with amplitude-dependent coefficients whose
squares form the diffusion matrix of the linearized module, and the third
mode is noiseless.  Ensemble averages of products converge to normally
ordered expectation values, which is what makes this module an independent
oracle for the deterministic steady states and the linearized covariances.

Scheme: Euler-Maruyama with fixed step.  The drift is not globally
Lipschitz, so trajectories can escape to infinity in finite time; amplitudes
beyond a hard cap are classified as divergent and excluded from averages
rather than silently integrated on.

Reproducibility contract: the generator is counter-based (Philox keyed by
the seed) and exactly one (4, n_traj) block of standard normals is drawn per
time step, rows ordered as the noises on (alpha_1, alpha_1_plus, alpha_2,
alpha_2_plus).  Identical seed and settings give bit-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import FieldState, SystemParams, validate_params

__all__ = [
    "EnsembleMoments",
    "NonFiniteError",
    "ExcessiveDivergence",
    "make_rng",
    "step_trajectory",
    "run_ensemble",
]

# Amplitudes beyond this are treated as escaped trajectories.
_AMPLITUDE_CAP = 1e6
# Fraction of divergent trajectories above which results are unreliable.
_DIVERGENCE_BUDGET = 0.01


class NonFiniteError(RuntimeError):
    """A trajectory left the finite region (positive-P escape)."""


class ExcessiveDivergence(RuntimeError):
    """More than the budgeted fraction of trajectories diverged."""


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator; independent streams come from distinct seeds."""
    return np.random.Generator(np.random.Philox(key=seed))


def _drift_arrays(a: np.ndarray, b: np.ndarray, p: SystemParams):
    # a, b have shape (3, n): the plain and plus amplitudes of each column.
    f = np.empty_like(a)
    g = np.empty_like(b)
    e = complex(p.epsilon)
    f[0] = e - p.gamma1 * a[0] + p.kappa1 * b[0] * a[1]
    g[0] = np.conj(e) - p.gamma1 * b[0] + p.kappa1 * a[0] * b[1]
    f[1] = -p.gamma2 * a[1] + p.kappa2 * b[1] * a[2] - 0.5 * p.kappa1 * a[0] * a[0]
    g[1] = -p.gamma2 * b[1] + p.kappa2 * a[1] * b[2] - 0.5 * p.kappa1 * b[0] * b[0]
    f[2] = -p.gamma3 * a[2] - 0.5 * p.kappa2 * a[1] * a[1]
    g[2] = -p.gamma3 * b[2] - 0.5 * p.kappa2 * b[1] * b[1]
    return f, g


def _apply_step(a: np.ndarray, b: np.ndarray, p: SystemParams, dt: float,
                noise: np.ndarray) -> None:
    # In-place Euler-Maruyama update; noise coefficients use the pre-step
    # state (Ito reading, which the equations' form makes equivalent to
    # Stratonovich for the moments of interest).
    f, g = _drift_arrays(a, b, p)
    sdt = np.sqrt(dt)
    na1 = np.sqrt(p.kappa1 * a[1]) * (sdt * noise[0])
    nb1 = np.sqrt(p.kappa1 * b[1]) * (sdt * noise[1])
    na2 = np.sqrt(p.kappa2 * a[2]) * (sdt * noise[2])
    nb2 = np.sqrt(p.kappa2 * b[2]) * (sdt * noise[3])
    a += dt * f
    b += dt * g
    a[0] += na1
    b[0] += nb1
    a[1] += na2
    b[1] += nb2


def step_trajectory(s: FieldState, p: SystemParams, dt: float,
                    rng: np.random.Generator | None = None,
                    noise: np.ndarray | None = None) -> FieldState:
    """One Euler-Maruyama step of a single trajectory.

    noise supplies the four standard normals explicitly (zeros reduce the
    step to deterministic Euler); otherwise they are drawn from rng.  The
    complex square roots in the noise amplitudes are principal-branch.
    Raises NonFiniteError when the step escapes the finite region.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    p = validate_params(p)
    if noise is None:
        if rng is None:
            raise ValueError("provide either rng or explicit noise")
        noise = rng.standard_normal(4)
    noise = np.asarray(noise, dtype=float).reshape(4, 1)
    a = np.array(s.alpha, dtype=complex).reshape(3, 1)
    b = np.array(s.alpha_plus, dtype=complex).reshape(3, 1)
    _apply_step(a, b, p, dt, noise)
    out = np.concatenate([a[:, 0], b[:, 0]])
    if not np.all(np.isfinite(out.view(float))) or np.abs(out).max() > _AMPLITUDE_CAP:
        raise NonFiniteError("trajectory diverged")
    return FieldState(alpha=a[:, 0], alpha_plus=b[:, 0])


def _mean_and_stderr(values: np.ndarray):
    # values: (..., n) complex over trajectories; stderr is packed with the
    # real part's standard error in .real and the imaginary part's in .imag.
    n = values.shape[-1]
    mean = values.mean(axis=-1)
    if n < 2:
        se = np.zeros_like(mean)
    else:
        se = (values.real.std(axis=-1, ddof=1)
              + 1j * values.imag.std(axis=-1, ddof=1)) / np.sqrt(n)
    return mean, se


@dataclass(frozen=True)
class EnsembleMoments:
    """Ensemble statistics at the sampled times.

    means holds the six doubled amplitudes (a1, a1+, a2, a2+, a3, a3+) per
    sample time; second_doubled the full symmetric matrix of pair products
    of the doubled vector, which contains every normally ordered pair:
    <a_i a_j> at [2i, 2j], <a_i+ a_j> at [2i+1, 2j], <a_i+ a_j+> at
    [2i+1, 2j+1] (zero-based mode offsets).  fluct_cov is the sample
    covariance of the doubled vector (products of deviations from the
    ensemble mean), directly comparable to the linearized stationary
    covariance.  All stderr arrays pack SE(real) + 1j SE(imag).
    """

    n_traj: int
    dt: float
    seed: int
    t_grid: np.ndarray
    means: np.ndarray
    means_stderr: np.ndarray
    second_doubled: np.ndarray
    second_doubled_stderr: np.ndarray
    fluct_cov: np.ndarray
    fluct_cov_stderr: np.ndarray
    divergent: int
    final_states: np.ndarray | None = None

    @property
    def reliable(self) -> bool:
        return self.divergent <= _DIVERGENCE_BUDGET * self.n_traj

    def number_moment(self, i: int, j: int, t_index: int = -1) -> complex:
        """<alpha_i+ alpha_j> at a sample time (modes 1-based)."""
        return complex(self.second_doubled[t_index, 2 * (i - 1) + 1, 2 * (j - 1)])

    def anomalous_moment(self, i: int, j: int, t_index: int = -1) -> complex:
        """<alpha_i alpha_j> at a sample time (modes 1-based)."""
        return complex(self.second_doubled[t_index, 2 * (i - 1), 2 * (j - 1)])


def run_ensemble(p: SystemParams, dt: float = 1e-4, t_end: float = 50.0,
                 n_traj: int = 1000, seed: int = 0,
                 sample_times: list[float] | None = None,
                 initial: FieldState | None = None,
                 keep_final_states: bool = False,
                 strict: bool = True) -> EnsembleMoments:
    """Integrate an ensemble and return its moment statistics.

    Sampling happens at the step closest to each requested time (default:
    half, three quarters, and end of the run).  Divergent trajectories are
    frozen out of all later samples; when more than 1% diverge the result is
    unreliable and strict=True raises ExcessiveDivergence (strict=False
    returns it flagged instead).
    """
    p = validate_params(p)
    if dt <= 0 or t_end <= 0 or n_traj < 1:
        raise ValueError("dt, t_end and n_traj must be positive")
    n_steps = int(round(t_end / dt))
    if sample_times is None:
        sample_times = [0.5 * t_end, 0.75 * t_end, t_end]
    sample_steps = sorted({min(n_steps, max(1, int(round(ts / dt))))
                           for ts in sample_times})
    t_grid = np.array([s * dt for s in sample_steps])

    if initial is None:
        initial = FieldState.vacuum()
    a = np.tile(np.asarray(initial.alpha, dtype=complex).reshape(3, 1), (1, n_traj))
    b = np.tile(np.asarray(initial.alpha_plus, dtype=complex).reshape(3, 1), (1, n_traj))
    alive = np.ones(n_traj, dtype=bool)
    rng = make_rng(seed)

    n_samples = len(sample_steps)
    means = np.empty((n_samples, 6), dtype=complex)
    means_se = np.empty((n_samples, 6), dtype=complex)
    m2 = np.empty((n_samples, 6, 6), dtype=complex)
    m2_se = np.empty((n_samples, 6, 6), dtype=complex)
    fcov = np.empty((n_samples, 6, 6), dtype=complex)
    fcov_se = np.empty((n_samples, 6, 6), dtype=complex)

    def doubled_live() -> np.ndarray:
        v = np.empty((6, int(alive.sum())), dtype=complex)
        v[0::2] = a[:, alive]
        v[1::2] = b[:, alive]
        return v

    def record(slot: int) -> None:
        v = doubled_live()
        if v.shape[1] == 0:
            raise ExcessiveDivergence("all trajectories diverged")
        means[slot], means_se[slot] = _mean_and_stderr(v)
        prod = v[:, None, :] * v[None, :, :]
        m2[slot], m2_se[slot] = _mean_and_stderr(prod)
        w = v - means[slot][:, None]
        dev = w[:, None, :] * w[None, :, :]
        fcov[slot], fcov_se[slot] = _mean_and_stderr(dev)

    sample_iter = iter(enumerate(sample_steps))
    next_slot, next_step = next(sample_iter)
    with np.errstate(invalid="ignore", over="ignore"):
        for step in range(1, n_steps + 1):
            noise = rng.standard_normal((4, n_traj))
            _apply_step(a, b, p, dt, noise)
            if step % 200 == 0 or step == n_steps or step == next_step:
                ok = (np.isfinite(a).all(axis=0) & np.isfinite(b).all(axis=0)
                      & (np.abs(a).max(axis=0) <= _AMPLITUDE_CAP)
                      & (np.abs(b).max(axis=0) <= _AMPLITUDE_CAP))
                newly_dead = alive & ~ok
                if newly_dead.any():
                    alive &= ok
                    # park escaped columns so they stop producing overflow
                    a[:, newly_dead] = 0
                    b[:, newly_dead] = 0
            if step == next_step:
                record(next_slot)
                try:
                    next_slot, next_step = next(sample_iter)
                except StopIteration:
                    next_step = -1

    divergent = int(n_traj - alive.sum())
    result = EnsembleMoments(
        n_traj=n_traj, dt=dt, seed=seed, t_grid=t_grid,
        means=means, means_stderr=means_se,
        second_doubled=m2, second_doubled_stderr=m2_se,
        fluct_cov=fcov, fluct_cov_stderr=fcov_se,
        divergent=divergent,
        final_states=doubled_live() if keep_final_states else None)
    if strict and not result.reliable:
        raise ExcessiveDivergence(
            f"{divergent} of {n_traj} trajectories diverged")
    return result
