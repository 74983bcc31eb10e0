"""Lattice data types, the discrete Laplacian, norms, and the coupled-system operator.

A state on the integer lattice is stored as a contiguous complex window
(offset + values); sites outside the window are implicitly zero.  The
two-speed coupled system is generated by a real symmetric tridiagonal
matrix acting on the stacked unknowns (u(-M..-1), v(1..M)), with the
shared junction value eliminated through the coupling and reconstructed
afterwards as

    u(0) = (b2^2 u(-1) + b1^2 v(1)) / (b1^2 + b2^2),

the unique value satisfying both junction relations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class LatticeState:
    """Finitely supported complex function on the integer lattice.

    ``values[k]`` is the amplitude at site ``offset + k``.  Values are
    coerced to a read-only complex128 array; NaN/Inf are rejected.
    """

    offset: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("lattice state needs a nonempty 1-D value window")
        if not np.all(np.isfinite(vals)):
            raise ValueError("lattice state contains non-finite values")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "offset", int(self.offset))
        object.__setattr__(self, "values", vals)

    @classmethod
    def delta(cls, site: int = 0) -> "LatticeState":
        return cls(site, np.array([1.0 + 0.0j]))

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.values.size)

    @property
    def last_site(self) -> int:
        return self.offset + self.values.size - 1

    def get(self, j) -> np.ndarray:
        """Amplitude at site(s) j, zero outside the stored window."""
        j = np.asarray(j)
        idx = j - self.offset
        inside = (idx >= 0) & (idx < self.values.size)
        out = np.zeros(j.shape, dtype=np.complex128)
        out[inside] = self.values[idx[inside]]
        return out if out.shape else out[()]

    def restrict(self, lo: int, hi: int) -> "LatticeState":
        """State on the window [lo, hi] (inclusive), padding with zeros."""
        if hi < lo:
            raise ValueError("empty restriction window")
        out = np.zeros(hi - lo + 1, dtype=np.complex128)
        a = max(lo, self.offset)
        b = min(hi, self.last_site)
        if a <= b:
            out[a - lo : b - lo + 1] = self.values[a - self.offset : b - self.offset + 1]
        return LatticeState(lo, out)

    def conj(self) -> "LatticeState":
        return LatticeState(self.offset, np.conj(self.values))

    def trimmed(self, floor: float = 0.0) -> "LatticeState":
        """Drop leading/trailing sites with |value| <= floor (keeps >= 1 site)."""
        mag = np.abs(self.values)
        keep = np.nonzero(mag > floor)[0]
        if keep.size == 0:
            return LatticeState(self.offset, self.values[:1] * 0.0)
        return LatticeState(self.offset + int(keep[0]), self.values[keep[0] : keep[-1] + 1])


def lp_norm(state: LatticeState | np.ndarray, p: float) -> float:
    """l^p norm of a lattice state, p in [1, inf]."""
    if p != np.inf and p < 1.0:
        raise ValueError(f"l^p norm needs p >= 1 or p = inf, got {p}")
    vals = state.values if isinstance(state, LatticeState) else np.asarray(state)
    mag = np.abs(vals)
    if p == np.inf:
        return float(mag.max())
    m = float(mag.max())
    if m == 0.0:
        return 0.0
    # scale by the max to keep |.|^p away from overflow/underflow
    return float(m * np.sum((mag / m) ** p) ** (1.0 / p))


def discrete_laplacian(state: LatticeState) -> LatticeState:
    """Second central difference u(j+1) - 2u(j) + u(j-1); support grows by one site each side."""
    out = np.convolve(state.values, np.array([1.0, -2.0, 1.0], dtype=np.complex128))
    return LatticeState(state.offset - 1, out)


@dataclass(frozen=True)
class CoupledLatticeSpec:
    """Two half-lattices with speeds (b1, b2), coupled at the origin, truncated at M sites per side."""

    b1: float
    b2: float
    truncation: int

    def __post_init__(self):
        if not (self.b1 > 0 and self.b2 > 0):
            raise ValueError("coupling speeds b1, b2 must be positive")
        if self.truncation < 2:
            raise ValueError("truncation must keep at least 2 sites per side")

    @property
    def junction_weight(self) -> float:
        return 1.0 / (self.b1**2 + self.b2**2)

    def junction_value(self, left: complex, right: complex) -> complex:
        """Eliminated shared value u(0)=v(0) from its neighbours u(-1), v(1)."""
        b1sq, b2sq = self.b1**2, self.b2**2
        return (b2sq * left + b1sq * right) / (b1sq + b2sq)


@dataclass(frozen=True)
class SymmetricOperator:
    """Real symmetric tridiagonal operator stored as (diagonal, off-diagonal)."""

    diagonal: np.ndarray
    offdiagonal: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        d = np.asarray(self.diagonal, dtype=float)
        e = np.asarray(self.offdiagonal, dtype=float)
        if e.size != d.size - 1:
            raise ValueError("off-diagonal must have length dimension - 1")
        d = d.copy()
        e = e.copy()
        d.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "offdiagonal", e)

    @property
    def dimension(self) -> int:
        return self.diagonal.size

    def entry(self, i: int, j: int) -> float:
        if not (0 <= i < self.dimension and 0 <= j < self.dimension):
            raise IndexError("operator index out of range")
        if i == j:
            return float(self.diagonal[i])
        if abs(i - j) == 1:
            return float(self.offdiagonal[min(i, j)])
        return 0.0

    def to_dense(self) -> np.ndarray:
        a = np.diag(self.diagonal)
        idx = np.arange(self.dimension - 1)
        a[idx, idx + 1] = self.offdiagonal
        a[idx + 1, idx] = self.offdiagonal
        return a

    def row_sums(self) -> np.ndarray:
        s = self.diagonal.copy()
        s[:-1] += self.offdiagonal
        s[1:] += self.offdiagonal
        return s

    def apply(self, vec: np.ndarray) -> np.ndarray:
        vec = np.asarray(vec)
        out = self.diagonal * vec
        out[:-1] += self.offdiagonal * vec[1:]
        out[1:] += self.offdiagonal * vec[:-1]
        return out


def build_coupled_operator(spec: CoupledLatticeSpec) -> SymmetricOperator:
    """(2M)x(2M) truncation of the coupled-system generator.

    Unknown ordering is (u(-M), ..., u(-1), v(1), ..., v(M)).  Interior rows
    carry b^-2 (1, -2, 1) with b = b1 on the left block and b2 on the right;
    the two junction rows mix through 1/(b1^2 + b2^2).  The truncation ends
    are Dirichlet (rows simply cut), so end rows do not sum to zero.
    """
    m = spec.truncation
    w1 = spec.b1**-2
    w2 = spec.b2**-2
    kappa = spec.junction_weight
    diag = np.empty(2 * m)
    off = np.empty(2 * m - 1)
    diag[: m - 1] = -2.0 * w1
    diag[m - 1] = -w1 - kappa
    diag[m] = -kappa - w2
    diag[m + 1 :] = -2.0 * w2
    off[: m - 1] = w1
    off[m - 1] = kappa
    off[m:] = w2
    return SymmetricOperator(diag, off, meta={"spec": spec})
