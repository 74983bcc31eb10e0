"""Decay-exponent estimation, the alpha_p exponent family, and the torus sup-norm.

fit_decay is ordinary least squares of log(norm) against log(t); the
theoretical exponent, when known, rides along in the result so reports can
show fitted-vs-predicted side by side.

The alpha_p family for the lattice kernel is

    alpha_p = (p-2)/(2p)  on [2, 4),   (p-1)/(3p)  on (4, inf],

with alpha_4 = 1/4 filled in by two-sided continuity (both branches agree
there) and alpha_inf = 1/3.  Empirical exponents come from l^p norms of
the kernel row |K_t(j)| = |J_j(2t)| truncated at |j| <= 2 ceil(2t) + 200;
the neglected tail is certified against the observed superexponential
falloff beyond the ballistic front.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, ResourceLimitError
from .kernel import kernel_abs_row

TAIL_RELATIVE_BOUND = 1e-10


@dataclass(frozen=True)
class DecayFit:
    """Fitted log-log power law over a time window."""

    slope: float
    intercept: float
    r_squared: float
    window: tuple[float, float]
    theoretical: float | None = None


def fit_decay(times, norms, window: tuple[float, float] | None = None,
              theoretical: float | None = None) -> DecayFit:
    """OLS fit of log(norm) vs log(t) on the window (inclusive)."""
    times = np.asarray(times, dtype=float)
    norms = np.asarray(norms, dtype=float)
    if times.shape != norms.shape or times.ndim != 1:
        raise ValueError("times and norms must be 1-D arrays of equal length")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    if window is None:
        window = (float(times[0]), float(times[-1]))
    t_min, t_max = float(window[0]), float(window[1])
    if not t_min < t_max:
        raise ValueError(f"degenerate fit window [{t_min}, {t_max}]")
    mask = (times >= t_min) & (times <= t_max)
    if int(mask.sum()) < 8:
        raise ValueError(f"need at least 8 samples in the window, have {int(mask.sum())}")
    t_sel = times[mask]
    n_sel = norms[mask]
    if np.any(n_sel <= 0) or np.any(t_sel <= 0):
        raise ValueError("fit needs positive times and norms")
    lx = np.log(t_sel)
    ly = np.log(n_sel)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot <= 1e-30 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return DecayFit(float(slope), float(intercept), max(0.0, min(1.0, r2)),
                    (t_min, t_max), theoretical)


# ---------------------------------------------------------------------------
# alpha_p family


def alpha_p_theory(p: float) -> float:
    """Theoretical l^p decay exponent of the lattice kernel, p in [2, inf]."""
    if p != np.inf and p < 2.0:
        raise ValueError(f"alpha_p is defined for p >= 2, got {p}")
    if p == np.inf:
        return 1.0 / 3.0
    if p < 4.0:
        return (p - 2.0) / (2.0 * p)
    if p == 4.0:
        # both branch limits equal 1/4; close the typographical gap by continuity
        return 0.25
    return (p - 1.0) / (3.0 * p)


@dataclass(frozen=True)
class ExponentTable:
    """alpha_p sampled on a grid of p values."""

    entries: tuple[tuple[float, float], ...]

    @classmethod
    def on_grid(cls, ps) -> "ExponentTable":
        return cls(tuple((float(p), alpha_p_theory(p)) for p in ps))


def kernel_truncation(t: float) -> int:
    return 2 * int(math.ceil(2.0 * abs(t))) + 200


@functools.lru_cache(maxsize=512)
def _kernel_row_cached(t: float) -> np.ndarray:
    return kernel_abs_row(t, kernel_truncation(t))


def kernel_lp_norm(t: float, p: float) -> float:
    """l^p norm of K_t over the lattice, with a certified truncation tail."""
    if p != np.inf and p < 1.0:
        raise ValueError("p must be >= 1 or inf")
    row = _kernel_row_cached(float(t))
    # certify the discarded tail from the observed falloff at the edge
    edge = row[-6:]
    if edge[-1] > 0 and edge[0] > 0:
        q = (edge[-1] / edge[0]) ** (1.0 / 5.0)
        tail = edge[-1] * q / (1.0 - q) if q < 0.5 else math.inf
    else:
        tail = 0.0
    if p == np.inf:
        value = float(row.max())
        tail_contrib = tail
    else:
        body = row[1:]
        value = float((row[0] ** p + 2.0 * np.sum(body**p)) ** (1.0 / p))
        tail_contrib = 2.0 * tail**p if tail < 1.0 else math.inf
    if tail_contrib > TAIL_RELATIVE_BOUND * max(value, 1e-300):
        raise AccuracyError(
            f"kernel l^{p} truncation tail not certified at t = {t}",
            achieved=tail_contrib, requested=TAIL_RELATIVE_BOUND * value,
        )
    return value


def alpha_p_empirical(p: float, t_grid, window: tuple[float, float] | None = None,
                      *, budget: int = 200) -> DecayFit:
    """Fit the measured l^p kernel decay; theoretical field carries -alpha_p."""
    if p != np.inf and p < 2.0:
        raise ValueError(f"alpha_p comparison needs p >= 2, got {p}")
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size > budget:
        raise ResourceLimitError(f"t grid of {t_grid.size} points exceeds the budget {budget}")
    norms = np.array([kernel_lp_norm(t, p) for t in t_grid])
    return fit_decay(t_grid, norms, window, theoretical=-alpha_p_theory(p))


# ---------------------------------------------------------------------------
# torus partial sums


@dataclass(frozen=True)
class TorusData:
    """Frequency-truncated torus datum: coefficients a_k for |k| <= N (index k + N)."""

    cutoff: int
    coefficients: np.ndarray

    def __post_init__(self):
        coeff = np.asarray(self.coefficients, dtype=np.complex128).copy()
        if self.cutoff < 1:
            raise ValueError("frequency cutoff must be >= 1")
        if coeff.shape != (2 * self.cutoff + 1,):
            raise ValueError(f"need {2 * self.cutoff + 1} coefficients for cutoff {self.cutoff}")
        if not np.any(coeff != 0):
            raise ValueError("at least one coefficient must be nonzero")
        coeff.setflags(write=False)
        object.__setattr__(self, "coefficients", coeff)

    @classmethod
    def ones(cls, cutoff: int) -> "TorusData":
        return cls(cutoff, np.ones(2 * cutoff + 1))

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.cutoff, self.cutoff + 1)


def _torus_eval(data: TorusData, t: float, x: np.ndarray) -> np.ndarray:
    k = data.modes
    amps = data.coefficients * np.exp(1j * t * k.astype(float) ** 2)
    out = np.empty(x.size, dtype=np.complex128)
    chunk = max(1, (1 << 22) // (2 * data.cutoff + 1))
    for lo in range(0, x.size, chunk):
        seg = x[lo : lo + chunk]
        out[lo : lo + seg.size] = np.exp(1j * np.outer(seg, k)) @ amps
    return out


def torus_supnorm(data: TorusData, t: float, oversample: int = 8, *,
                  cap: int = 1 << 22) -> float:
    """sup_x |sum a_k exp(i(tk^2 + kx))| by oversampled grid plus one local refinement."""
    if oversample < 8:
        raise ValueError("oversample must be >= 8")
    g = oversample * (2 * data.cutoff + 1)
    if g > cap:
        raise ResourceLimitError(f"torus grid of {g} points exceeds the cap {cap}")
    x = 2.0 * np.pi * np.arange(g) / g
    mag = np.abs(_torus_eval(data, t, x))
    i_best = int(np.argmax(mag))
    best = float(mag[i_best])
    # golden-section pass over the bracketing cells around the grid argmax
    lo = x[i_best] - 2.0 * np.pi / g
    hi = x[i_best] + 2.0 * np.pi / g
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc = float(np.abs(_torus_eval(data, t, np.array([c]))[0]))
    fd = float(np.abs(_torus_eval(data, t, np.array([d]))[0]))
    for _ in range(48):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = float(np.abs(_torus_eval(data, t, np.array([c]))[0]))
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = float(np.abs(_torus_eval(data, t, np.array([d]))[0]))
    return max(best, fc, fd)


def torus_l1_norm(data: TorusData, rel_tol: float = 1e-6, *, cap: int = 1 << 22) -> float:
    """Normalized L1 norm (1/2pi) Int |sum a_k e^{ikx}| dx, refined until grid-doubling stable."""
    g = 64 * (2 * data.cutoff + 1)
    prev = None
    while g <= cap:
        x = 2.0 * np.pi * np.arange(g) / g
        val = float(np.mean(np.abs(_torus_eval(data, 0.0, x))))
        if prev is not None and abs(val - prev) <= rel_tol * max(abs(val), 1e-300):
            return val
        prev = val
        g *= 2
    raise ResourceLimitError(f"torus L1 quadrature did not stabilize below the cap {cap}")
