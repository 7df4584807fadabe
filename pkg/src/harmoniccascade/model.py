"""Parameter and state types shared by every other module.

The physical system is a driven cavity holding three resonant fields at a
fundamental frequency and its second and fourth harmonics, coupled by two
chi(2) processes.  Mode indexing is fixed throughout the package:

    1 = fundamental, 2 = second harmonic, 3 = fourth harmonic.

Quadratures follow the convention X = a + a^dag, Y = -i(a - a^dag), so the
vacuum variance is 1 and the uncertainty bound is V(X) V(Y) >= 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "SystemParams",
    "FieldState",
    "QuadCovariance",
    "NonPositiveRate",
    "NonHermitianResidue",
    "validate_params",
    "quad_index_x",
    "quad_index_y",
]


class NonPositiveRate(ValueError):
    """A coupling or loss rate that must be positive is not."""


class NonHermitianResidue(ValueError):
    """A matrix expected to be real symmetric has excess imaginary part."""


def quad_index_x(mode: int) -> int:
    """Row/column of X_mode in the 6x6 quadrature basis (X1,Y1,X2,Y2,X3,Y3)."""
    if mode not in (1, 2, 3):
        raise ValueError(f"mode must be 1, 2 or 3, got {mode}")
    return 2 * (mode - 1)


def quad_index_y(mode: int) -> int:
    """Row/column of Y_mode in the 6x6 quadrature basis."""
    if mode not in (1, 2, 3):
        raise ValueError(f"mode must be 1, 2 or 3, got {mode}")
    return 2 * (mode - 1) + 1


@dataclass(frozen=True)
class SystemParams:
    """Rates and pump amplitude defining one experiment.

    kappa1 couples modes 1 and 2, kappa2 couples modes 2 and 3 (inverse time
    per unit amplitude).  epsilon is the external pump amplitude feeding mode
    1; it may be complex, though every reference configuration uses real
    positive epsilon.  gamma1..gamma3 are the cavity loss rates of the three
    modes.  Time is measured in units of 1/gamma1, so gamma1 == 1 in the
    canonical normalization.
    """

    kappa1: float
    kappa2: float
    epsilon: complex
    gamma1: float = 1.0
    gamma2: float = 1.0
    gamma3: float = 1.0

    def gammas(self) -> np.ndarray:
        return np.array([self.gamma1, self.gamma2, self.gamma3], dtype=float)


def validate_params(p: SystemParams, allow_rescale: bool = False) -> SystemParams:
    """Check positivity and the gamma1 == 1 normalization.

    Returns the params unchanged when valid.  When gamma1 != 1,
    allow_rescale=True re-expresses all rates and the pump in units of
    1/gamma1 instead of rejecting; idempotent either way.
    """
    bad = [name for name in ("kappa1", "kappa2", "gamma1", "gamma2", "gamma3")
           if not getattr(p, name) > 0]
    if bad:
        raise NonPositiveRate(
            "rates must be positive, violated by: " + ", ".join(bad))
    if p.gamma1 != 1.0:
        if not allow_rescale:
            raise NonPositiveRate(
                f"gamma1 must be 1 in canonical time units, got {p.gamma1}; "
                "pass allow_rescale=True to renormalize")
        g = p.gamma1
        p = replace(p, kappa1=p.kappa1 / g, kappa2=p.kappa2 / g,
                    epsilon=p.epsilon / g, gamma1=1.0,
                    gamma2=p.gamma2 / g, gamma3=p.gamma3 / g)
    return p


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class FieldState:
    """Six doubled phase-space amplitudes (alpha_i, alpha_i_plus).

    On the classical manifold alpha_plus[i] == conj(alpha[i]) exactly; in
    stochastic trajectories the pair members evolve independently and the
    equality holds only on ensemble average.
    """

    alpha: np.ndarray
    alpha_plus: np.ndarray

    def __post_init__(self):
        a = _frozen(np.asarray(self.alpha, dtype=complex).reshape(3))
        ap = _frozen(np.asarray(self.alpha_plus, dtype=complex).reshape(3))
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "alpha_plus", ap)

    @classmethod
    def classical(cls, alpha) -> "FieldState":
        """State on the classical manifold: alpha_plus = conj(alpha)."""
        a = np.asarray(alpha, dtype=complex).reshape(3)
        return cls(alpha=a, alpha_plus=np.conj(a))

    @classmethod
    def vacuum(cls) -> "FieldState":
        return cls.classical(np.zeros(3))

    def is_classical(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.alpha_plus - np.conj(self.alpha)) <= tol))

    def doubled(self) -> np.ndarray:
        """Interleaved 6-vector (a1, a1+, a2, a2+, a3, a3+)."""
        out = np.empty(6, dtype=complex)
        out[0::2] = self.alpha
        out[1::2] = self.alpha_plus
        return out

    @classmethod
    def from_doubled(cls, v) -> "FieldState":
        v = np.asarray(v, dtype=complex).reshape(6)
        return cls(alpha=v[0::2], alpha_plus=v[1::2])

    def mean_quadratures(self) -> np.ndarray:
        """(X1, Y1, X2, Y2, X3, Y3) means of this state."""
        x = self.alpha + self.alpha_plus
        y = -1j * (self.alpha - self.alpha_plus)
        out = np.empty(6, dtype=complex)
        out[0::2] = x
        out[1::2] = y
        return out


@dataclass(frozen=True)
class QuadCovariance:
    """Output spectral covariance at one frequency.

    matrix is the 6x6 real symmetric array of output quadrature variances
    and covariances in the basis (X1, Y1, X2, Y2, X3, Y3), normalized so the
    vacuum value is 1 on the diagonal.  omega is in units of gamma1.
    """

    omega: float
    matrix: np.ndarray
    _SYM_TOL = 1e-10

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (6, 6):
            raise ValueError(f"matrix must be 6x6, got {m.shape}")
        if np.abs(m - m.T).max() > self._SYM_TOL:
            raise NonHermitianResidue(
                f"asymmetry {np.abs(m - m.T).max():.3e} exceeds tolerance")
        object.__setattr__(self, "matrix", _frozen(0.5 * (m + m.T)))

    @classmethod
    def vacuum(cls, omega: float = 0.0) -> "QuadCovariance":
        return cls(omega=omega, matrix=np.eye(6))

    def variance(self, label: str, mode: int) -> float:
        """V(X_mode) for label 'X', V(Y_mode) for label 'Y'."""
        idx = quad_index_x(mode) if label == "X" else quad_index_y(mode)
        return float(self.matrix[idx, idx])

    def uncertainty_products(self) -> np.ndarray:
        """V(X_i) V(Y_i) for the three modes; each >= 1 for physical states."""
        d = np.diag(self.matrix)
        return d[0::2] * d[1::2]
