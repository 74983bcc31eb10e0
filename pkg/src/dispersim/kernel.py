"""Fundamental-solution kernel of the lattice evolution and related oscillatory integrals.

The dispersion relation of the discrete Laplacian is

    psi(xi) = 4 sin^2(xi/2) = 2 - 2 cos(xi),

and the (normalized) kernel is

    K_t(j) = (1/2pi) Int_{-pi}^{pi} exp(-i t psi(xi)) exp(i j xi) d xi
           = exp(-2it) i^j J_j(2t),

the second form following from the Bessel integral representation.  The
1/2pi factor makes K_0 the unit impulse so convolution reproduces the
initial datum.  Both routes are implemented: controlled panel quadrature
(kernel_quadrature) and the closed form (kernel_bessel); they cross-check
each other.

The two-speed coupled system reduces to a parametric oscillatory integral

    I(t, y, z, a) = Int_0^pi exp(it (2 cos th + 2 z arcsin(a sin(th/2))))
                    exp(i t y th) sin th d th,

evaluated here by the same oscillation-resolving panel scheme.  Panel
counts grow linearly with the total phase variation, so every panel sees
a bounded number of oscillation cycles; accuracy is certified by panel
doubling, and failure to meet the tolerance raises AccuracyError with
the achieved estimate.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .bessel import bessel_j, bessel_j_array
from .errors import AccuracyError

TOL_MIN = 1e-13
TOL_MAX = 1e-4

_GAUSS_ORDER = 20
_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(_GAUSS_ORDER)
_MAX_DOUBLINGS = 4

# ---------------------------------------------------------------------------
# phase function


def psi(xi):
    """Dispersion relation 4 sin^2(xi/2)."""
    return 4.0 * np.sin(np.asarray(xi) / 2.0) ** 2


def psi_d1(xi):
    return 2.0 * np.sin(np.asarray(xi))


def psi_d2(xi):
    return 2.0 * np.cos(np.asarray(xi))


def psi_d3(xi):
    return -2.0 * np.sin(np.asarray(xi))


def phase_vdc_margin(grid_size: int) -> float:
    """min over a uniform grid of |psi''| + |psi'''| (the non-degeneracy margin).

    Analytically the minimum of 2(|cos| + |sin|) is 2, attained at multiples
    of pi/2; a uniform grid can only overshoot by O(spacing).
    """
    if grid_size < 1000:
        raise ValueError("grid_size must be at least 1000")
    xi = np.linspace(-np.pi, np.pi, grid_size)
    return float(np.min(np.abs(psi_d2(xi)) + np.abs(psi_d3(xi))))


# ---------------------------------------------------------------------------
# panel quadrature


def _panel_sum(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, n_panels: int) -> complex:
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * (edges[1] - edges[0])
    centers = 0.5 * (edges[:-1] + edges[1:])
    pts = centers[:, None] + half * _GAUSS_NODES[None, :]
    vals = f(pts.ravel()).reshape(n_panels, _GAUSS_ORDER)
    return complex(half * np.sum(vals @ _GAUSS_WEIGHTS))


def _oscillatory_integral(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    base_panels: int,
    tol: float,
    what: str,
) -> complex:
    """Panel quadrature refined by doubling until |I_2n - I_n| <= tol."""
    n = base_panels
    prev = _panel_sum(f, a, b, n)
    err = math.inf
    for _ in range(_MAX_DOUBLINGS):
        n *= 2
        cur = _panel_sum(f, a, b, n)
        err = abs(cur - prev)
        if err <= tol:
            return cur
        prev = cur
    raise AccuracyError(f"{what}: panel budget exhausted", achieved=err, requested=tol)


def _check_tol(tol: float):
    if not (TOL_MIN <= tol <= TOL_MAX):
        raise ValueError(f"tolerance must lie in [{TOL_MIN}, {TOL_MAX}], got {tol}")


# ---------------------------------------------------------------------------
# kernel evaluation


def kernel_quadrature(t: float, j: int, tol: float = 1e-10) -> complex:
    """K_t(j) by direct panel quadrature with absolute error <= tol."""
    _check_tol(tol)
    t = float(t)
    j = int(j)

    def integrand(xi):
        return np.exp(1j * (j * xi - t * psi(xi))) / (2.0 * np.pi)

    # |phase'| <= 2|t| + |j|, so this keeps panels at <= ~2 cycles each
    base = max(4, int(math.ceil(1.0 + abs(t) + abs(j))))
    return _oscillatory_integral(integrand, -np.pi, np.pi, base, tol, "kernel quadrature")


def kernel_bessel(t: float, j: int) -> complex:
    """Closed form K_t(j) = exp(-2it) i^j J_j(2t); the independent kernel oracle."""
    t = float(t)
    j = int(j)
    return complex(np.exp(-2j * t) * (1j ** (j % 4)) * bessel_j(j, 2.0 * t))


def kernel_abs_row(t: float, jmax: int) -> np.ndarray:
    """|K_t(j)| for j = 0..jmax in one pass (|K_t(j)| = |J_j(2t)|, even in j)."""
    return np.abs(bessel_j_array(jmax, 2.0 * float(t)))


# ---------------------------------------------------------------------------
# coupled-system oscillatory integral


def coupled_oscillatory_integral(
    t: float, y: float, z: float, a: float, tol: float = 1e-10
) -> complex:
    """The uniform-parameter integral I(t, y, z, a); a in (0, 1].

    The arcsin argument a sin(th/2) stays in [0, a] on th in [0, pi], so the
    principal branch is unambiguous.
    """
    _check_tol(tol)
    if not (0.0 < a <= 1.0):
        raise ValueError(f"parameter a must lie in (0, 1], got {a}")
    t, y, z = float(t), float(y), float(z)

    def integrand(th):
        phase = t * (2.0 * np.cos(th) + 2.0 * z * np.arcsin(a * np.sin(th / 2.0)) + y * th)
        return np.exp(1j * phase) * np.sin(th)

    # |phase'| <= |t| (2 + |y| + |z|) over a length-pi interval
    base = max(4, int(math.ceil(1.0 + 0.5 * abs(t) * (1.0 + abs(y) + abs(z)))))
    return _oscillatory_integral(integrand, 0.0, np.pi, base, tol, "coupled oscillatory integral")
