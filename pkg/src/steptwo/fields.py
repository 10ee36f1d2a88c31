"""Sampled fields and the convolution calculus on them.

Fields live on uniform tensor-product grids.  Each axis is half-open:
points lo + i*step for i = 0..count-1, with lo chosen so the origin is a
lattice point.  Differences of grid points then land on the same lattice,
which the convolution quadratures rely on, and the plain Riemann sum
(= trapezoid rule on a periodized window) is spectrally accurate for the
rapidly decaying integrands used throughout.
"""

import json
import struct
from dataclasses import dataclass, field
from itertools import product as iproduct

import numpy as np

from .errors import DimensionError, GridError

_MAGIC = b"S2FIELD\x00"


@dataclass(frozen=True)
class Axis:
    lo: float
    step: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise GridError(f"axis needs at least 2 points, got {self.count}")
        if self.step <= 0:
            raise GridError(f"axis step must be positive, got {self.step}")

    @property
    def hi(self):
        """Last grid point."""
        return self.lo + (self.count - 1) * self.step

    def points(self):
        return self.lo + self.step * np.arange(self.count)

    @property
    def zero_index(self):
        """Index of the origin on this axis; error if 0 is off the lattice."""
        z = -self.lo / self.step
        zi = int(round(z))
        if abs(z - zi) > 1e-9 or not 0 <= zi < self.count:
            raise GridError(
                f"axis [{self.lo}, step {self.step}, count {self.count}] does "
                "not contain the origin as a lattice point"
            )
        return zi


def symmetric_axis(radius, count):
    """Axis covering about [-radius, radius) with the origin on the lattice."""
    step = 2.0 * radius / count
    return Axis(lo=-step * (count // 2), step=step, count=count)


@dataclass(frozen=True)
class SampledField:
    """Complex samples of a function on a uniform rectangular grid.

    ``axes`` holds one Axis per dimension; ``values`` has the matching
    shape in row-major axis order.  ``group`` and ``tau`` are optional
    context carried along by operations that know them.
    """

    axes: tuple
    values: np.ndarray = field(repr=False)
    group: object = None
    tau: object = None

    def __post_init__(self):
        shape = tuple(a.count for a in self.axes)
        if self.values.shape != shape:
            raise GridError(
                f"values of shape {self.values.shape} do not match grid "
                f"shape {shape}"
            )
        vals = np.asarray(self.values, dtype=complex)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def ndim(self):
        return len(self.axes)

    @property
    def cell_volume(self):
        return float(np.prod([a.step for a in self.axes]))

    def grids(self):
        return [a.points() for a in self.axes]

    def mesh(self):
        """All grid points, shape (*counts, ndim)."""
        return np.stack(np.meshgrid(*self.grids(), indexing="ij"), axis=-1)

    def flat_points(self):
        return self.mesh().reshape(-1, self.ndim)

    def integrate(self):
        return complex(self.values.sum() * self.cell_volume)

    def l1_norm(self):
        return float(np.abs(self.values).sum() * self.cell_volume)

    def l2_norm_sq(self):
        return float((np.abs(self.values) ** 2).sum() * self.cell_volume)

    @classmethod
    def from_function(cls, axes, fn, group=None, tau=None):
        """Sample fn on the grid; fn maps an (..., ndim) array to values."""
        axes = tuple(axes)
        pts = np.stack(
            np.meshgrid(*[a.points() for a in axes], indexing="ij"), axis=-1
        )
        vals = np.asarray(fn(pts), dtype=complex)
        return cls(axes=axes, values=vals, group=group, tau=tau)

    def with_values(self, values):
        return SampledField(
            axes=self.axes, values=values, group=self.group, tau=self.tau
        )

    # -- serialization: binary container + JSON sidecar -----------------------

    def save(self, path):
        path = str(path)
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<q", self.ndim))
            for a in self.axes:
                fh.write(struct.pack("<ddq", a.lo, a.step, a.count))
            fh.write(np.ascontiguousarray(self.values, dtype=complex).tobytes())
        sidecar = {
            "ndim": self.ndim,
            "axes": [
                {"min": a.lo, "max": a.hi, "step": a.step, "count": a.count}
                for a in self.axes
            ],
            "tau": None if self.tau is None else np.asarray(self.tau).tolist(),
            "group": None
            if self.group is None
            else json.loads(self.group.to_json()),
        }
        with open(path + ".json", "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, indent=2)

    @classmethod
    def load(cls, path):
        from .groups import group_from_dict

        path = str(path)
        with open(path, "rb") as fh:
            if fh.read(8) != _MAGIC:
                raise GridError(f"{path} is not a field container")
            (ndim,) = struct.unpack("<q", fh.read(8))
            axes = []
            for _ in range(ndim):
                lo, step, count = struct.unpack("<ddq", fh.read(24))
                axes.append(Axis(lo=lo, step=step, count=count))
            shape = tuple(a.count for a in axes)
            raw = fh.read(16 * int(np.prod(shape)))
            values = np.frombuffer(raw, dtype=complex).reshape(shape).copy()
        group = tau = None
        try:
            with open(path + ".json", "r", encoding="utf-8") as fh:
                sidecar = json.load(fh)
        except FileNotFoundError:
            sidecar = {}
        if sidecar.get("tau") is not None:
            tau = np.asarray(sidecar["tau"], dtype=float)
        if sidecar.get("group") is not None:
            group = group_from_dict(sidecar["group"])
        return cls(axes=tuple(axes), values=values, group=group, tau=tau)

    def to_csv(self, path):
        """One row per grid point: coordinates, then re, im."""
        pts = self.flat_points()
        vals = self.values.reshape(-1)
        data = np.column_stack([pts, vals.real, vals.imag])
        header = ",".join([f"x{i}" for i in range(self.ndim)] + ["re", "im"])
        np.savetxt(path, data, delimiter=",", header=header, comments="")


def _check_shared_grid(f, g):
    if f.ndim != g.ndim or any(
        (a.lo, a.step, a.count) != (b.lo, b.step, b.count)
        for a, b in zip(f.axes, g.axes)
    ):
        raise GridError("fields must share the same grid")


def _apply_kernel(vals, kernel, ax):
    """Contract kernel (out, in) against axis ``ax`` of vals."""
    moved = np.moveaxis(vals, ax, 0)
    return np.moveaxis(np.einsum("fm,m...->f...", kernel, moved), 0, ax)


# ---------------------------------------------------------------------------
# partial Fourier transform
# ---------------------------------------------------------------------------


def partial_fourier(f, tau):
    """Integrate out the central variables against exp(-i tau . s).

    ``f`` is sampled over 2n + r axes with the r central axes last; the
    result is a field over the first 2n axes.  Raises when some |tau_beta|
    exceeds the Nyquist limit pi/step of its axis.
    """
    tau = np.asarray(tau, dtype=float).reshape(-1)
    r = tau.size
    if r >= f.ndim:
        raise GridError(
            f"field has {f.ndim} axes, cannot split off {r} central axes"
        )
    central = f.axes[f.ndim - r :]
    for beta, a in enumerate(central):
        if abs(tau[beta]) > np.pi / a.step:
            raise GridError(
                f"tau[{beta}] = {tau[beta]} exceeds the Nyquist limit "
                f"{np.pi / a.step:.6g} of its grid axis"
            )
    phase = np.ones(tuple(a.count for a in central), dtype=complex)
    for beta, a in enumerate(central):
        shape = [1] * r
        shape[beta] = a.count
        phase = phase * np.exp(-1j * tau[beta] * a.points()).reshape(shape)
    weight = float(np.prod([a.step for a in central]))
    flat = f.values.reshape(f.values.shape[: f.ndim - r] + (-1,))
    out = np.einsum("...s,s->...", flat, phase.reshape(-1)) * weight
    return SampledField(
        axes=f.axes[: f.ndim - r], values=out, group=f.group, tau=tau
    )


# ---------------------------------------------------------------------------
# twisted convolution
# ---------------------------------------------------------------------------


def _strided_axes(axes, stride):
    out_axes, starts = [], []
    for a in axes:
        start = a.zero_index % stride
        count = len(range(start, a.count, stride))
        out_axes.append(
            Axis(lo=a.lo + start * a.step, step=a.step * stride, count=count)
        )
        starts.append(start)
    return tuple(out_axes), starts


def _twisted_engine(f, g, M, out_stride=1, batch=128):
    """Quadrature of int exp(-2i y.M x) f(y-x) g(x) dx on the shared grid.

    f(y-x) is a lattice lookup (zero outside the window): both points are
    on the grid and the origin is a lattice point, so their difference has
    integer grid coordinates.  All contractions go through einsum, which
    keeps the reduction order fixed regardless of BLAS threading.
    """
    _check_shared_grid(f, g)
    d = f.ndim
    if d % 2:
        raise GridError("twisted convolution needs an even number of axes")
    counts = np.array([a.count for a in f.axes])
    zero = np.array([a.zero_index for a in f.axes])
    steps = np.array([a.step for a in f.axes])
    los = np.array([a.lo for a in f.axes])

    grid_idx = np.stack(
        np.meshgrid(*[np.arange(c) for c in counts], indexing="ij"), axis=-1
    ).reshape(-1, d)
    x_pts = los + grid_idx * steps
    gw = g.values.reshape(-1) * f.cell_volume
    f_flat = f.values.reshape(-1)

    out_axes, starts = _strided_axes(f.axes, out_stride)
    out_counts = tuple(a.count for a in out_axes)
    out_idx = np.stack(
        np.meshgrid(
            *[s + out_stride * np.arange(c) for s, c in zip(starts, out_counts)],
            indexing="ij",
        ),
        axis=-1,
    ).reshape(-1, d)

    twoM = 2.0 * np.asarray(M, dtype=float)
    out = np.empty(out_idx.shape[0], dtype=complex)
    for lo_b in range(0, out_idx.shape[0], batch):
        I = out_idx[lo_b : lo_b + batch]
        y_pts = los + I * steps
        K = I[:, None, :] - grid_idx[None, :, :] + zero
        valid = np.all((K >= 0) & (K < counts), axis=-1)
        flat_idx = np.ravel_multi_index(
            tuple(np.moveaxis(K, -1, 0)), tuple(counts), mode="clip"
        )
        fv = np.where(valid, f_flat[flat_idx], 0.0)
        phase = np.exp(-1j * np.einsum("bd,xd->bx", y_pts @ twoM, x_pts))
        out[lo_b : lo_b + batch] = np.einsum("bx,bx,x->b", phase, fv, gw)
    return out.reshape(out_counts), out_axes


def twisted_convolve(f, g, group, tau, out_stride=1):
    """Twisted convolution of two fields over R^(2n) at frequency tau.

    Direct quadrature of the defining oscillatory integral on the shared
    grid; this is the slow oracle path.  tau = 0 reduces to the Euclidean
    convolution.  ``out_stride`` > 1 evaluates on a strided subgrid (which
    still contains the origin).
    """
    tau = np.asarray(tau, dtype=float).reshape(-1)
    values, axes = _twisted_engine(f, g, group.b_tau(tau), out_stride)
    return SampledField(axes=axes, values=values, group=group, tau=tau)


def twisted_convolve_1d(f, g, tau, out_stride=1):
    """One-complex-slot twisted convolution, phase exp(-2i tau (-y1 x2 + y2 x1))."""
    if f.ndim != 2:
        raise GridError("twisted_convolve_1d expects fields over R^2")
    M = float(tau) * np.array([[0.0, -1.0], [1.0, 0.0]])
    values, axes = _twisted_engine(f, g, M, out_stride)
    return SampledField(axes=axes, values=values, tau=np.array([float(tau)]))


# ---------------------------------------------------------------------------
# local Lagrange resampling (for the off-lattice central twist)
# ---------------------------------------------------------------------------


def _resample_axis(block, positions, ax, order):
    """Interpolate ``block`` along axis ``ax`` at fractional sample indices.

    ``block`` has a leading chunk dimension; ``positions`` is (chunk, c_out)
    and gives, per chunk element, the real-valued source indices to read.
    Local Lagrange interpolation with ``order`` taps, zero outside.
    """
    chunk, c_out = positions.shape
    c_in = block.shape[ax]
    base = np.floor(positions).astype(int) - (order // 2 - 1)
    rel = positions - base  # in [order//2 - 1, order//2), per tap offsets 0..order-1
    nodes = np.arange(order)
    taps = np.ones(positions.shape + (order,))
    for i in range(order):
        for j in range(order):
            if j != i:
                taps[..., i] *= (rel - nodes[j]) / (nodes[i] - nodes[j])

    lowest = int(base.min())
    highest = int(base.max()) + order - 1
    off = max(0, -lowest)
    width = off + max(c_in, highest + 1) + 1
    pad_shape = list(block.shape)
    pad_shape[ax] = width
    padded = np.zeros(pad_shape, dtype=block.dtype)
    sl = [slice(None)] * block.ndim
    sl[ax] = slice(off, off + c_in)
    padded[tuple(sl)] = block

    moved = np.moveaxis(padded, ax, 1)  # (chunk, width, rest...)
    rest = moved.shape[2:]
    out = np.zeros((chunk, c_out) + rest, dtype=block.dtype)
    for s in range(order):
        src = base + s + off  # (chunk, c_out)
        idx = src.reshape((chunk, c_out) + (1,) * len(rest))
        gathered = np.take_along_axis(moved, idx, axis=1)
        out += gathered * taps[..., s].reshape((chunk, c_out) + (1,) * len(rest))
    return np.moveaxis(out, 1, ax)


# ---------------------------------------------------------------------------
# group convolution (direct quadrature)
# ---------------------------------------------------------------------------


def group_convolve(phi, psi, group, out_points=None, interp_order=8, x_chunk=64):
    """Group convolution by direct quadrature over the sampled lattice.

    Evaluates ``int phi(x,t) psi((x,t)^{-1}(y,s)) dx dt``.  The horizontal
    shift y - x stays on the lattice; the central argument picks up the
    off-lattice twist -2B(x, y), handled by local Lagrange resampling of
    psi along the central axes.  Desk-scale only.

    Parameters
    ----------
    phi, psi : SampledField over R^(2n+r), shared grid
    group : StepTwoGroup
    out_points : optional sequence of GroupPoint
        When given, evaluate only at these points (horizontal parts must
        lie on the lattice; central parts may be anywhere) and return the
        array of values.  Otherwise return a SampledField on the full
        grid, which is implemented for r = 1.
    """
    _check_shared_grid(phi, psi)
    m, r = group.m, group.r
    if phi.ndim != m + r:
        raise GridError(
            f"fields must have {m + r} axes for this group, got {phi.ndim}"
        )
    y_axes, t_axes = phi.axes[:m], phi.axes[m:]
    y_counts = np.array([a.count for a in y_axes])
    t_counts = tuple(a.count for a in t_axes)
    y_zero = np.array([a.zero_index for a in y_axes])
    t_steps = np.array([a.step for a in t_axes])
    t_zero = np.array([a.zero_index for a in t_axes])
    t_los = np.array([a.lo for a in t_axes])

    y_idx = np.stack(
        np.meshgrid(*[np.arange(c) for c in y_counts], indexing="ij"), axis=-1
    ).reshape(-1, m)
    y_pts = np.array([a.lo for a in y_axes]) + y_idx * np.array(
        [a.step for a in y_axes]
    )
    n_x = y_idx.shape[0]
    phi_xt = phi.values.reshape((n_x,) + t_counts)
    psi_xt = psi.values.reshape((n_x,) + t_counts)
    w = phi.cell_volume
    order = min(interp_order, min(t_counts))

    def _accumulate(y_index, y_point, probe_s):
        # lattice index of y - x and the central twist 2 B(x, y) per x
        diff = y_index[None, :] - y_idx + y_zero
        ok = np.all((diff >= 0) & (diff < y_counts), axis=1)
        xs_all = np.nonzero(ok)[0]
        hidx_all = np.ravel_multi_index(tuple(diff[xs_all].T), tuple(y_counts))
        delta_all = 2.0 * np.einsum(
            "bkl,xk,l->xb", group.B, y_pts[xs_all], y_point
        )
        if probe_s is None:
            acc = np.zeros(t_counts, dtype=complex)
        else:
            acc = 0.0 + 0.0j
        for lo in range(0, xs_all.size, x_chunk):
            xs = xs_all[lo : lo + x_chunk]
            block = psi_xt[hidx_all[lo : lo + x_chunk]]
            delta = delta_all[lo : lo + x_chunk]
            if probe_s is None:
                acc = acc + _correlate_central(
                    phi_xt[xs], block, delta, t_counts, t_steps, t_zero, order
                )
            else:
                vals = block
                for beta in range(r):
                    c = t_counts[beta]
                    # source index of coordinate s0 - t_b - delta
                    pos = (
                        (probe_s[beta] - delta[:, beta] - 2.0 * t_los[beta])
                        / t_steps[beta]
                    )[:, None] - np.arange(c)[None, :]
                    vals = _resample_axis(vals, pos, 1 + beta, order)
                acc = acc + (phi_xt[xs] * vals).sum()
        return acc * w

    if out_points is not None:
        return np.array(
            [
                _accumulate(
                    _lattice_index(p.y, y_axes), np.asarray(p.y), np.asarray(p.t)
                )
                for p in out_points
            ]
        )

    if r != 1:
        raise GridError(
            "full-grid group convolution is implemented for r = 1; pass "
            "out_points for groups with larger centers"
        )
    out = np.empty((n_x,) + t_counts, dtype=complex)
    for row in range(n_x):
        out[row] = _accumulate(y_idx[row], y_pts[row], None)
    return SampledField(
        axes=phi.axes, values=out.reshape(phi.values.shape), group=group
    )


def _correlate_central(phi_block, psi_block, delta, t_counts, t_steps, t_zero, order):
    """sum_x sum_t phi(x,t) psi(y-x, s-t-delta(x)) on the full central lattice.

    r = 1 only: builds the difference table chi(x, s-t) by one resampling
    pass, then contracts.
    """
    c = t_counts[0]
    z = t_zero[0]
    diffs = np.arange(-(c - 1), c)  # possible s - t lattice offsets
    pos = (diffs[None, :] - delta[:, [0]] / t_steps[0]) + z
    chi = _resample_axis(psi_block, pos, 1, order)  # (chunk, 2c-1)
    s_idx = np.arange(c)
    table_idx = s_idx[:, None] - s_idx[None, :] + (c - 1)  # (s, t)
    return np.einsum("xt,xst->s", phi_block, chi[:, table_idx])


def _lattice_index(y, axes):
    idx = []
    for val, a in zip(y, axes):
        q = (val - a.lo) / a.step
        qi = int(round(q))
        if abs(q - qi) > 1e-9 or not 0 <= qi < a.count:
            raise GridError(
                f"output horizontal coordinate {val} is not a lattice point"
            )
        idx.append(qi)
    return np.array(idx)


# ---------------------------------------------------------------------------
# Euclidean Fourier helpers and the Fourier-side group convolution
# ---------------------------------------------------------------------------


def dual_axis_points(a, offset=0.0):
    """Centered dual-lattice frequencies of an axis (spacing 2 pi / window).

    A fractional ``offset`` shifts every node by offset * spacing; the
    shifted lattice still inverts the trapezoid transform exactly and, at
    offset 1/2, avoids placing a node at frequency zero.
    """
    return (
        2.0
        * np.pi
        * (np.arange(a.count) - a.count // 2 + offset)
        / (a.count * a.step)
    )


def euclidean_ft(f, offsets=None):
    """Continuous Fourier transform sampled on the (offset) dual lattice."""
    offsets = offsets or [0.0] * f.ndim
    vals = f.values.astype(complex)
    for ax, (a, off) in enumerate(zip(f.axes, offsets)):
        kernel = (
            np.exp(-1j * np.outer(dual_axis_points(a, off), a.points())) * a.step
        )
        vals = _apply_kernel(vals, kernel, ax)
    return vals


def shifted_horizontal_frequency(group, tau, y, xi):
    """Shifted frequency argument of the Fourier-side convolution formula.

    Componentwise xi_l - 2 sum_{k,beta} B^beta_{kl} y_k tau_beta; linear in
    y, equal to xi at y = 0.
    """
    M = group.b_tau(np.asarray(tau, dtype=float))
    return np.asarray(xi, dtype=float) - 2.0 * (M.T @ np.asarray(y, dtype=float))


def group_convolve_fourier(phi, psi, group):
    """Group convolution through Euclidean Fourier transforms.

    Cross-check path against the direct quadrature: pairs the transform of
    psi with the transform of phi taken at the shifted horizontal
    frequency; the shift is realized exactly by modulating phi before its
    horizontal transform, so no frequency interpolation occurs.
    """
    _check_shared_grid(phi, psi)
    m, r = group.m, group.r
    if phi.ndim != m + r:
        raise GridError(
            f"fields must have {m + r} axes for this group, got {phi.ndim}"
        )
    y_axes, t_axes = phi.axes[:m], phi.axes[m:]
    y_shape = tuple(a.count for a in y_axes)
    n_y = int(np.prod(y_shape))
    n_t = int(np.prod([a.count for a in t_axes]))

    psi_hat = euclidean_ft(psi).reshape(n_y, n_t)

    # phi transformed along the central axes only, still sampled in x
    phi_half = phi.values.astype(complex)
    for off, a in enumerate(t_axes):
        kernel = np.exp(-1j * np.outer(dual_axis_points(a), a.points())) * a.step
        phi_half = _apply_kernel(phi_half, kernel, m + off)
    phi_half = phi_half.reshape(n_y, n_t)

    y_pts = np.stack(
        np.meshgrid(*[a.points() for a in y_axes], indexing="ij"), axis=-1
    ).reshape(-1, m)
    xi_pts = np.stack(
        np.meshgrid(*[dual_axis_points(a) for a in y_axes], indexing="ij"),
        axis=-1,
    ).reshape(-1, m)
    tau_pts = np.stack(
        np.meshgrid(*[dual_axis_points(a) for a in t_axes], indexing="ij"),
        axis=-1,
    ).reshape(-1, r)
    t_pts = np.stack(
        np.meshgrid(*[a.points() for a in t_axes], indexing="ij"), axis=-1
    ).reshape(-1, r)
    x_kernels = [
        np.exp(-1j * np.outer(dual_axis_points(a), a.points())) * a.step
        for a in y_axes
    ]

    dual_vol = float(np.prod([2.0 * np.pi / (a.count * a.step) for a in phi.axes]))
    out = np.empty((n_y, n_t), dtype=complex)
    for iy, y in enumerate(y_pts):
        byx = np.einsum("bkl,k,xl->xb", group.B, y, y_pts)  # B(y, x) per lattice x
        phase_y = np.exp(1j * (xi_pts @ y))
        acc_tau = np.empty(tau_pts.shape[0], dtype=complex)
        for itau, tau in enumerate(tau_pts):
            # modulation turns the frequency shift into an exact transform
            cube = (phi_half[:, itau] * np.exp(2j * (byx @ tau))).reshape(y_shape)
            for ax in range(m):
                cube = _apply_kernel(cube, x_kernels[ax], ax)
            acc_tau[itau] = np.einsum(
                "x,x,x->", phase_y, cube.reshape(-1), psi_hat[:, itau]
            )
        out[iy] = np.einsum("tq,q->t", np.exp(1j * (t_pts @ tau_pts.T)), acc_tau)
    out *= dual_vol / (2.0 * np.pi) ** phi.ndim
    return SampledField(
        axes=phi.axes, values=out.reshape(phi.values.shape), group=group
    )


# ---------------------------------------------------------------------------
# Abel approximation of identity
# ---------------------------------------------------------------------------


def abel_multiplier(frame, R, xi_hat):
    """Frequency-domain factor of the Abel-summed reproducing family.

    ``xi_hat`` holds frame components of the shifted frequency, shape
    (..., 2n); the factor is prod_j (2/(1+R)) exp(-((1-R)/(1+R)) *
    |pair_j|^2 / (4 mu_j)) and equals (2/(1+R))^n at xi_hat = 0.
    """
    pairs = xi_hat[..., 0::2] ** 2 + xi_hat[..., 1::2] ** 2
    expo = -((1.0 - R) / (1.0 + R)) * pairs / (4.0 * frame.mu)
    return np.prod(2.0 / (1.0 + R) * np.exp(expo), axis=-1)


def abel_approx_identity(f, group, R, terms=None):
    """Abel-summed approximate identity applied to a sampled field.

    For R in (0,1), evaluates the Abel sum of the reproducing series in
    closed multiplier form on the Euclidean Fourier side (``terms=None``);
    with ``terms=K`` it instead accumulates the explicit partial sum of
    convolutions with the radial basis distributions of total degree <= K
    (slow cross-check path).  As R -> 1- the output converges to f.
    """
    from .spectral import normalize

    if not 0.0 < R < 1.0:
        raise DimensionError(f"Abel parameter must be in (0,1), got {R}")
    m, r = group.m, group.r
    if f.ndim != m + r:
        raise GridError(f"field must have {m + r} axes, got {f.ndim}")
    if terms is not None:
        return _abel_direct(f, group, R, terms)

    y_axes, t_axes = f.axes[:m], f.axes[m:]
    y_shape = tuple(a.count for a in y_axes)
    t_shape = tuple(a.count for a in t_axes)
    n_y, n_t = int(np.prod(y_shape)), int(np.prod(t_shape))
    # half-offset central dual lattice: no node sits on the degenerate
    # tau = 0 plane, where the multiplier is discontinuous
    offsets = [0.0] * m + [0.5] * r
    f_hat = euclidean_ft(f, offsets).reshape(n_y, n_t)

    xi_pts = np.stack(
        np.meshgrid(*[dual_axis_points(a) for a in y_axes], indexing="ij"),
        axis=-1,
    ).reshape(-1, m)
    tau_pts = np.stack(
        np.meshgrid(*[dual_axis_points(a, 0.5) for a in t_axes], indexing="ij"),
        axis=-1,
    ).reshape(-1, r)
    y_pts = np.stack(
        np.meshgrid(*[a.points() for a in y_axes], indexing="ij"), axis=-1
    ).reshape(-1, m)
    t_pts = np.stack(
        np.meshgrid(*[a.points() for a in t_axes], indexing="ij"), axis=-1
    ).reshape(-1, r)

    phase_yx = np.exp(1j * (y_pts @ xi_pts.T))
    partial = np.zeros((n_y, tau_pts.shape[0]), dtype=complex)
    for itau, tau in enumerate(tau_pts):
        frame = normalize(group, tau)
        # the multiplier sits on the right convolution factor, so its
        # argument is shifted the opposite way to the left-factor shift
        # of the Fourier-side group convolution
        shift = 2.0 * y_pts @ group.b_tau(tau)  # rows: 2 M^T y
        xi_hat = (xi_pts[None, :, :] + shift[:, None, :]) @ frame.O
        mult = abel_multiplier(frame, R, xi_hat)
        partial[:, itau] = np.einsum("yx,yx,x->y", phase_yx, mult, f_hat[:, itau])
    dual_vol = float(np.prod([2.0 * np.pi / (a.count * a.step) for a in f.axes]))
    phase_t = np.exp(1j * (t_pts @ tau_pts.T))
    out = np.einsum("yq,tq->yt", partial, phase_t) * (
        dual_vol / (2.0 * np.pi) ** f.ndim
    )
    return SampledField(
        axes=f.axes, values=out.reshape(y_shape + t_shape), group=group
    )


def _abel_direct(f, group, R, terms):
    """Partial-sum path: twisted convolutions accumulated on the dual lattice."""
    from .laguerre import exp_laguerre, raw_index
    from .spectral import normalize

    m, r, n = group.m, group.r, group.n
    y_axes, t_axes = f.axes[:m], f.axes[m:]
    y_shape = tuple(a.count for a in y_axes)
    t_shape = tuple(a.count for a in t_axes)
    n_y, n_t = int(np.prod(y_shape)), int(np.prod(t_shape))
    tau_pts = np.stack(
        np.meshgrid(*[dual_axis_points(a, 0.5) for a in t_axes], indexing="ij"),
        axis=-1,
    ).reshape(-1, r)
    t_pts = np.stack(
        np.meshgrid(*[a.points() for a in t_axes], indexing="ij"), axis=-1
    ).reshape(-1, r)

    partial = np.zeros((n_y, tau_pts.shape[0]), dtype=complex)
    for itau, tau in enumerate(tau_pts):
        frame = normalize(group, tau)
        f_tau = partial_fourier(f, tau)
        mesh = f_tau.mesh()
        acc = np.zeros(y_shape, dtype=complex)
        for k in iproduct(range(terms + 1), repeat=n):
            if sum(k) > terms:
                continue
            basis = f_tau.with_values(
                exp_laguerre(frame, raw_index(k, (0,) * n), mesh)
            )
            conv, _ = _twisted_engine(f_tau, basis, group.b_tau(tau))
            acc += (R ** sum(k)) * conv
        partial[:, itau] = acc.reshape(-1)
    dual_vol_t = float(np.prod([2.0 * np.pi / (a.count * a.step) for a in t_axes]))
    phase_t = np.exp(1j * (t_pts @ tau_pts.T))
    out = np.einsum("yq,tq->yt", partial, phase_t) * (
        dual_vol_t / (2.0 * np.pi) ** r
    )
    return SampledField(
        axes=f.axes, values=out.reshape(y_shape + t_shape), group=group
    )
