"""Truncated Laguerre tensors: the matrix symbols of functions at fixed tau.

A function over R^(2n), paired with a tau-frame, expands in the
exponential Laguerre basis indexed by matrix-unit addresses
(p, k) in {1..K}^n x {1..K}^n.  Its coefficient matrix turns twisted
convolution into matrix multiplication, so band-limited symbol algebra is
ordinary (truncated) linear algebra.
"""

from dataclasses import dataclass, field
from itertools import product as iproduct

import numpy as np

from .errors import DegenerateTauError, DimensionError, GridError
from .laguerre import basis_address, exp_laguerre, exp_laguerre_l2_norm_sq


def _addresses(n, K):
    """Multi-indices in {1..K}^n in lexicographic order."""
    return [tuple(a) for a in iproduct(range(1, K + 1), repeat=n)]


def _offset(multi, K):
    off = 0
    for v in multi:
        if not 1 <= v <= K:
            raise DimensionError(
                f"address entry {v} outside the truncation 1..{K}"
            )
        off = off * K + (v - 1)
    return off


def frames_compatible(a, b):
    return (
        a is b
        or (
            np.array_equal(a.tau, b.tau)
            and np.array_equal(a.mu, b.mu)
            and np.array_equal(a.O, b.O)
        )
    )


@dataclass(frozen=True)
class LaguerreTensor:
    """Truncated coefficient matrix of a function at one frequency.

    ``entries[i, j]`` is the coefficient at row address p = addresses[i]
    and column address k = addresses[j], with addresses enumerated
    lexicographically over {1..K}^n.
    """

    frame: object
    K: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        side = self.K ** self.frame.n
        if self.entries.shape != (side, side):
            raise DimensionError(
                f"entries must be {side}x{side} for K={self.K}, n={self.frame.n}"
            )
        if not np.all(np.isfinite(self.entries)):
            raise DimensionError("tensor entries must be finite")
        entries = np.asarray(self.entries, dtype=complex)
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    @property
    def n(self):
        return self.frame.n

    def addresses(self):
        return _addresses(self.n, self.K)

    def address_offset(self, multi):
        return _offset(multi, self.K)

    def coefficient(self, p, k):
        return self.entries[self.address_offset(p), self.address_offset(k)]

    def frobenius(self):
        return float(np.sqrt((np.abs(self.entries) ** 2).sum()))


def identity_tensor(frame, K):
    """Diagonal-ones tensor; a two-sided unit for band-limited products."""
    side = K ** frame.n
    return LaguerreTensor(frame=frame, K=K, entries=np.eye(side, dtype=complex))


def indicator_tensor(frame, K, p, k):
    """Single-entry tensor at row address p, column address k."""
    side = K ** frame.n
    entries = np.zeros((side, side), dtype=complex)
    entries[_offset(p, K), _offset(k, K)] = 1.0
    return LaguerreTensor(frame=frame, K=K, entries=entries)


def _basis_stack(frame, K, pts):
    """All K^(2n) basis functions on the points, shape (rows, cols, npts)."""
    addrs = _addresses(frame.n, K)
    side = len(addrs)
    flat = pts.reshape(-1, pts.shape[-1])
    stack = np.empty((side, side, flat.shape[0]), dtype=complex)
    for i, p in enumerate(addrs):
        for j, k in enumerate(addrs):
            stack[i, j] = exp_laguerre(frame, basis_address(p, k), flat)
    return stack


def _resolution_guard(frame, K, axes):
    # highest basis function behaves like a 2-d oscillator state of level
    # ~ 3(K-1); require >= 4 grid points per shortest radial wavelength
    level = 3 * (K - 1)
    kappa = np.sqrt(2.0 * frame.mu.max() * (2 * level + 1))
    h_max = np.pi / (2.0 * kappa)
    worst = max(a.step for a in axes)
    if worst > h_max:
        raise GridError(
            f"grid step {worst:.4g} too coarse for truncation K={K}: the "
            f"highest basis oscillation needs step <= {h_max:.4g}"
        )


def laguerre_coefficients(f, frame, K):
    """Analysis: project a sampled field onto the truncated Laguerre basis.

    Coefficients are grid inner products against the basis functions
    divided by their common squared norm (2/pi)^n prod_j mu_j; all
    addresses with entries <= K are retained.
    """
    if frame.mu[-1] <= 0:
        raise DegenerateTauError("laguerre_coefficients needs a non-degenerate frame")
    if f.ndim != 2 * frame.n:
        raise GridError(
            f"field has {f.ndim} axes; expected {2 * frame.n} for this frame"
        )
    _resolution_guard(frame, K, f.axes)
    stack = _basis_stack(frame, K, f.mesh())
    w = f.cell_volume / exp_laguerre_l2_norm_sq(frame)
    entries = np.einsum("x,ijx->ij", f.values.reshape(-1), stack.conj()) * w
    return LaguerreTensor(frame=frame, K=K, entries=entries)


def synthesize(T, y):
    """Evaluate the truncated expansion at points y of shape (..., 2n)."""
    y = np.asarray(y, dtype=float)
    stack = _basis_stack(T.frame, T.K, y)
    out = np.einsum("ij,ijx->x", T.entries, stack)
    return out.reshape(y.shape[:-1])


def tensor_multiply(A, B):
    """Symbol product: contraction over the shared middle address.

    Row p of the result pairs A's row p with B's column m through the sum
    over q of A[p, q] B[q, m]; with both operands truncated at K the
    result is the truncated product, exact when the factors' supports stay
    within half the truncation.
    """
    if not frames_compatible(A.frame, B.frame):
        raise DimensionError("tensor_multiply needs operands on the same frame")
    if A.K != B.K:
        raise DimensionError(
            f"tensor_multiply needs equal truncations, got {A.K} and {B.K}"
        )
    return LaguerreTensor(
        frame=A.frame,
        K=A.K,
        entries=np.einsum("pq,qm->pm", A.entries, B.entries),
    )


def apply_diagonal_symbol(T, diag_of_raw):
    """Right-multiply by a diagonal operator symbol.

    ``diag_of_raw(k_raw)`` maps the raw radial index (column address minus
    one) to its scalar; this is how diagonal operator symbols act on
    function tensors.
    """
    scale = np.array(
        [diag_of_raw(tuple(v - 1 for v in k)) for k in _addresses(T.n, T.K)]
    )
    return LaguerreTensor(frame=T.frame, K=T.K, entries=T.entries * scale[None, :])
