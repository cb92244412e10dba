"""Periodic cubical cell complexes on rectangular tori.

A k-cell of the grid is identified by a k-subset S of the axes (the spanned
directions) and an anchor point x on the lattice; a k-cochain stores one real
per k-cell, interpreted as the integral of the represented form over the
cell.  Coboundary stencils are integer-valued, so d compose d vanishes in
exact arithmetic; the discrete Hodge star is diagonal with weight

    (metric volume of the dual cell) / (metric volume of the cell),

where metric lengths use the per-axis weight fields e^(2 phi_i) sampled at
top-cell centers and cell-averaged onto lower cells.  The induced inner
product is <a, b> = sum_cells star_weight * a * b and the codifferential is
the adjoint of the coboundary for it.
"""

import numpy as np

from .backend import kernels
from .multivector import (
    axes_of_mask,
    exterior_axis_field,
    interior_axis_field,
    mask_of_axes,
    subsets_of_size,
)

__all__ = ["TorusGrid", "Cochain", "GridOperator", "cup", "sym_cup",
           "lie_derivative"]


def _shuffle_sign(i, j):
    inv = 0
    for q in range(4):
        if j >> q & 1:
            inv += bin(i >> (q + 1)).count("1")
    return -1.0 if inv & 1 else 1.0


class TorusGrid:
    """Periodic cubical complex on a flat or diagonally-weighted torus."""

    def __init__(self, dim, resolution, periods=None, metric_weights=None,
                 metric_id="flat"):
        if dim not in (2, 3, 4):
            raise ValueError("dim must be 2, 3 or 4")
        resolution = tuple(int(m) for m in np.atleast_1d(resolution))
        if len(resolution) == 1:
            resolution = resolution * dim
        if len(resolution) != dim or any(m < 3 for m in resolution):
            raise ValueError("resolution needs one entry >= 3 per axis")
        if periods is None:
            periods = (1.0,) * dim
        periods = tuple(float(L) for L in np.atleast_1d(periods))
        if len(periods) == 1:
            periods = periods * dim
        if len(periods) != dim or any(L <= 0 for L in periods):
            raise ValueError("periods must be positive")

        self.dim = dim
        self.resolution = resolution
        self.periods = periods
        self.spacing = tuple(L / m for L, m in zip(periods, resolution))
        self.ncells_top = int(np.prod(resolution))
        self.metric_id = metric_id

        if metric_weights is None:
            self.axis_scale = np.ones((dim,) + resolution)
            self.is_flat = True
        else:
            w = np.asarray(metric_weights, dtype=np.float64)
            if w.shape != (dim,) + resolution:
                raise ValueError(
                    f"metric_weights must have shape {(dim,) + resolution}"
                )
            if np.any(w <= 0):
                raise ValueError("metric weights must be strictly positive")
            self.axis_scale = np.sqrt(w)
            self.is_flat = bool(np.all(w == 1.0))

        self._subsets = {
            k: subsets_of_size(dim, k) for k in range(dim + 1)
        }
        self._row_of_mask = {
            k: {m: r for r, m in enumerate(masks)}
            for k, masks in self._subsets.items()
        }
        idx = np.arange(self.ncells_top, dtype=np.int64).reshape(resolution)
        self._idx_plus = np.ascontiguousarray(
            np.stack([np.roll(idx, -1, axis=a).ravel() for a in range(dim)])
        )
        self._idx_minus = np.ascontiguousarray(
            np.stack([np.roll(idx, 1, axis=a).ravel() for a in range(dim)])
        )
        self._d_terms = {}
        self._star_cache = {}
        self._length_cache = {}

    # -- basic structure ----------------------------------------------------

    @classmethod
    def flat(cls, dim, resolution, periods=None):
        return cls(dim, resolution, periods)

    @classmethod
    def from_weight_functions(cls, dim, resolution, periods=None, phi=None,
                              metric_id="weighted"):
        """Build with per-axis weights e^(2 phi_i(x)) from callables.

        phi is a single callable phi(points) -> (...,) applied to every axis
        (conformal type), or a sequence of dim callables, or None for flat.
        Callables receive an array of top-cell centers with shape (..., dim).
        """
        g = cls(dim, resolution, periods)
        if phi is None:
            return g
        pts = g.cell_centers()
        if callable(phi):
            phi = [phi] * dim
        w = np.stack([np.exp(2.0 * np.asarray(p(pts), dtype=np.float64))
                      for p in phi])
        return cls(dim, resolution, periods, metric_weights=w,
                   metric_id=metric_id)

    def subsets(self, k):
        """Axis-subset bitmasks of the k-cell rows, lexicographic order."""
        if not 0 <= k <= self.dim:
            raise ValueError(f"degree {k} out of range for dim {self.dim}")
        return self._subsets[k]

    def subset_row(self, k, axes):
        """Row index of the 0-based axis tuple within degree k."""
        return self._row_of_mask[k][mask_of_axes(axes)]

    def n_cells(self, k):
        return len(self._subsets[k]) * self.ncells_top

    def cell_centers(self):
        """Top-cell centers, shape resolution + (dim,)."""
        axes = [
            (np.arange(m) + 0.5) * h
            for m, h in zip(self.resolution, self.spacing)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack(mesh, axis=-1)

    def zeros(self, k):
        return Cochain(self, k, np.zeros((len(self._subsets[k]),)
                                         + self.resolution))

    def same_layout(self, other):
        return (self.dim == other.dim and self.resolution == other.resolution
                and self.periods == other.periods
                and self.metric_id == other.metric_id)

    # -- metric data ---------------------------------------------------------

    def _avg_backward(self, field, axis):
        return 0.5 * (field + np.roll(field, 1, axis=axis))

    def _avg_forward(self, field, axis):
        return 0.5 * (field + np.roll(field, -1, axis=axis))

    def axis_lengths(self, mask):
        """Metric length factor h_i * s_i per axis for cells of subset mask.

        s_i is the axis scale e^(phi_i) averaged backward over the axes not
        spanned by the cell (the cell anchors trail the top-cell centers by
        half a step in those directions).
        """
        if mask in self._length_cache:
            return self._length_cache[mask]
        s = self.axis_scale
        for a in range(self.dim):
            if not mask >> a & 1:
                s = self._avg_backward(s, axis=1 + a)
        ell = s * np.array(self.spacing).reshape((self.dim,) + (1,) * self.dim)
        self._length_cache[mask] = ell
        return ell

    def star_weights(self, k):
        """Diagonal Hodge weights, shape (n_subsets_k,) + resolution."""
        if k in self._star_cache:
            return self._star_cache[k]
        rows = []
        for mask in self._subsets[k]:
            ell = self.axis_lengths(mask)
            num = np.ones(self.resolution)
            den = np.ones(self.resolution)
            for a in range(self.dim):
                if mask >> a & 1:
                    den = den * ell[a]
                else:
                    num = num * ell[a]
            rows.append(num / den)
        w = np.ascontiguousarray(np.stack(rows))
        self._star_cache[k] = w
        return w

    def cell_volumes(self, k):
        """Metric k-volumes of the k-cells, same layout as star_weights."""
        rows = []
        for mask in self._subsets[k]:
            ell = self.axis_lengths(mask)
            v = np.ones(self.resolution)
            for a in range(self.dim):
                if mask >> a & 1:
                    v = v * ell[a]
            rows.append(v)
        return np.stack(rows)

    def top_measure(self):
        """Metric volume of each top cell, shape = resolution."""
        v = np.prod(np.array(self.spacing)) * np.ones(self.resolution)
        for a in range(self.dim):
            v = v * self.axis_scale[a]
        return v

    def inner(self, a, b):
        """Weighted L2 inner product of two cochains of equal degree."""
        if a.degree != b.degree:
            raise ValueError("degree mismatch in inner product")
        w = self.star_weights(a.degree)
        return float(np.sum(w * a.values * b.values))

    def norm(self, a):
        return float(np.sqrt(max(self.inner(a, a), 0.0)))

    # -- coboundary / codifferential ------------------------------------------

    def _terms(self, k):
        """Stencil terms (t_row, s_row, axis, sign) for d_k."""
        if k in self._d_terms:
            return self._d_terms[k]
        tt, ss, ax, sg = [], [], [], []
        for t_row, tmask in enumerate(self._subsets[k + 1]):
            for a in axes_of_mask(tmask):
                smask = tmask & ~(1 << a)
                tt.append(t_row)
                ss.append(self._row_of_mask[k][smask])
                ax.append(a)
                sg.append(_shuffle_sign(1 << a, smask))
        terms = (
            np.array(tt, dtype=np.int64),
            np.array(ss, dtype=np.int64),
            np.array(ax, dtype=np.int64),
            np.array(sg, dtype=np.float64),
        )
        self._d_terms[k] = terms
        return terms

    def d_apply(self, k, values):
        """Coboundary of structured values (rows, *resolution) of degree k."""
        if not 0 <= k < self.dim:
            raise ValueError(f"coboundary degree {k} out of range")
        tt, ss, ax, sg = self._terms(k)
        flat = np.ascontiguousarray(values.reshape(values.shape[0], -1))
        out = np.zeros((len(self._subsets[k + 1]), self.ncells_top))
        kernels.coboundary_apply(flat, out, tt, ss, ax, sg, self._idx_plus)
        return out.reshape((-1,) + self.resolution)

    def dT_apply(self, k, values):
        """Unweighted transpose of d_k applied to degree-(k+1) values."""
        tt, ss, ax, sg = self._terms(k)
        flat = np.ascontiguousarray(values.reshape(values.shape[0], -1))
        out = np.zeros((len(self._subsets[k]), self.ncells_top))
        kernels.coboundary_transpose_apply(flat, out, tt, ss, ax, sg,
                                           self._idx_minus)
        return out.reshape((-1,) + self.resolution)

    def delta_apply(self, k, values):
        """Codifferential (weighted adjoint of d) on degree-k values."""
        if not 0 < k <= self.dim:
            raise ValueError(f"codifferential degree {k} out of range")
        wk = self.star_weights(k)
        wkm = self.star_weights(k - 1)
        return self.dT_apply(k - 1, wk * values) / wkm

    # -- pointwise transfer ----------------------------------------------------

    def to_pointwise(self, c):
        """Orthonormal-frame component field at top-cell centers.

        Divides cell integrals by metric cell measures and averages each
        component lattice forward onto the top-cell centers; exact on
        constant fields, O(h^2) otherwise.  Shape: resolution + (2**dim,).
        """
        vols = self.cell_volumes(c.degree)
        out = np.zeros(self.resolution + (1 << self.dim,))
        for row, mask in enumerate(self._subsets[c.degree]):
            comp = c.values[row] / vols[row]
            for a in range(self.dim):
                if not mask >> a & 1:
                    comp = self._avg_forward(comp, axis=a)
            out[..., mask] = comp
        return out

    def from_pointwise(self, field, degree):
        """Right inverse of to_pointwise on constant fields."""
        vols = self.cell_volumes(degree)
        vals = np.zeros((len(self._subsets[degree]),) + self.resolution)
        for row, mask in enumerate(self._subsets[degree]):
            comp = field[..., mask]
            for a in range(self.dim):
                if not mask >> a & 1:
                    comp = self._avg_backward(comp, axis=a)
            vals[row] = comp * vols[row]
        return Cochain(self, degree, vals)

    def constant_form_cochain(self, axes, coefficient=1.0):
        """Cochain sampling coefficient * dx^axes (1-based axes tuple)."""
        k = len(axes)
        c = self.zeros(k)
        row = self.subset_row(k, tuple(a - 1 for a in axes))
        vol = 1.0
        for a in axes:
            vol *= self.spacing[a - 1]
        c.values[row] += coefficient * vol
        return c

    def sample_form(self, degree, component_fn):
        """Cochain of a smooth form by midpoint sampling of cell integrals.

        component_fn(axes, points) returns the coordinate component for the
        0-based axis tuple at an array of points (..., dim).
        """
        vals = np.zeros((len(self._subsets[degree]),) + self.resolution)
        centers = self.cell_centers()
        for row, mask in enumerate(self._subsets[degree]):
            axes = axes_of_mask(mask)
            pts = centers.copy()
            vol = 1.0
            for a in range(self.dim):
                if a in axes:
                    vol *= self.spacing[a]
                else:
                    pts[..., a] -= 0.5 * self.spacing[a]
            vals[row] = component_fn(axes, pts) * vol
        return Cochain(self, degree, vals)


class Cochain:
    """Degree-k values on the k-cells of a TorusGrid."""

    __slots__ = ("grid", "degree", "values")

    def __init__(self, grid, degree, values):
        values = np.asarray(values, dtype=np.float64)
        expect = (len(grid.subsets(degree)),) + grid.resolution
        if values.shape != expect:
            raise ValueError(f"expected values of shape {expect}, got "
                             f"{values.shape}")
        self.grid = grid
        self.degree = degree
        self.values = values

    def copy(self):
        return Cochain(self.grid, self.degree, self.values.copy())

    def d(self):
        return Cochain(self.grid, self.degree + 1,
                       self.grid.d_apply(self.degree, self.values))

    def delta(self):
        return Cochain(self.grid, self.degree - 1,
                       self.grid.delta_apply(self.degree, self.values))

    def norm(self):
        return self.grid.norm(self)

    def max_abs(self):
        return float(np.max(np.abs(self.values)))

    def _compat(self, other):
        if other.grid is not self.grid and not self.grid.same_layout(other.grid):
            raise ValueError("cochain grids do not match")
        if other.degree != self.degree:
            raise ValueError("cochain degrees do not match")

    def __add__(self, other):
        self._compat(other)
        return Cochain(self.grid, self.degree, self.values + other.values)

    def __sub__(self, other):
        self._compat(other)
        return Cochain(self.grid, self.degree, self.values - other.values)

    def __mul__(self, s):
        return Cochain(self.grid, self.degree, self.values * float(s))

    __rmul__ = __mul__

    def __neg__(self):
        return Cochain(self.grid, self.degree, -self.values)


class GridOperator:
    """Linear, reproducible action between cochain degrees."""

    def __init__(self, grid, domain_degree, codomain_degree, apply_values,
                 name=""):
        self.grid = grid
        self.domain_degree = domain_degree
        self.codomain_degree = codomain_degree
        self._apply = apply_values
        self.name = name

    def __call__(self, c):
        if c.degree != self.domain_degree:
            raise ValueError(f"{self.name or 'operator'} expects degree "
                             f"{self.domain_degree}, got {c.degree}")
        return Cochain(self.grid, self.codomain_degree, self._apply(c.values))

    def as_matrix(self):
        """Dense matrix for small-grid oracles (column-by-column apply)."""
        nin = self.grid.n_cells(self.domain_degree)
        nout = self.grid.n_cells(self.codomain_degree)
        shape_in = (len(self.grid.subsets(self.domain_degree)),) \
            + self.grid.resolution
        A = np.zeros((nout, nin))
        basis = np.zeros(nin)
        for j in range(nin):
            basis[j] = 1.0
            A[:, j] = self._apply(basis.reshape(shape_in)).ravel()
            basis[j] = 0.0
        return A


def coboundary(grid, k):
    """Cubical coboundary d_k as a GridOperator (integer stencil)."""
    return GridOperator(grid, k, k + 1, lambda v: grid.d_apply(k, v),
                        name=f"d_{k}")


def codifferential(grid, k):
    """Adjoint of the coboundary for the weighted inner product."""
    return GridOperator(grid, k, k - 1, lambda v: grid.delta_apply(k, v),
                        name=f"delta_{k}")


def hodge_star_op(grid, k):
    """Diagonal star: primal k-cochain values to dual (n-k)-cell values."""
    w = grid.star_weights(k)
    return GridOperator(grid, k, k, lambda v: w * v, name=f"star_{k}")


def _splittings(grid, pmask_size, tmask):
    axes = axes_of_mask(tmask)
    out = []

    def rec(i, chosen):
        if len(chosen) == pmask_size:
            s1 = mask_of_axes(chosen)
            s2 = tmask & ~s1
            out.append((s1, s2, _shuffle_sign(s1, s2)))
            return
        if i >= len(axes):
            return
        rec(i + 1, chosen + [axes[i]])
        rec(i + 1, chosen)

    rec(0, [])
    return out


def cup(a, b):
    """Cubical cup product (front face / back face with shuffle signs).

    Satisfies the Leibniz rule d(a cup b) = da cup b + (-1)^deg(a) a cup db
    exactly, and descends to the topological product on cohomology.
    """
    grid = a.grid
    if b.grid is not grid and not grid.same_layout(b.grid):
        raise ValueError("cup operands live on different grids")
    p, q = a.degree, b.degree
    if p + q > grid.dim:
        raise ValueError("cup degree overflow")
    out = grid.zeros(p + q)
    for t_row, tmask in enumerate(grid.subsets(p + q)):
        for s1, s2, sign in _splittings(grid, p, tmask):
            av = a.values[grid._row_of_mask[p][s1]]
            bv = b.values[grid._row_of_mask[q][s2]]
            for ax in axes_of_mask(s1):
                bv = np.roll(bv, -1, axis=ax)
            out.values[t_row] += sign * av * bv
    return out


def sym_cup(a, b):
    """Symmetrized cup: (a cup b + (-1)^(pq) b cup a) / 2."""
    sgn = -1.0 if (a.degree * b.degree) & 1 else 1.0
    res = cup(a, b) + sgn * cup(b, a)
    return 0.5 * res


def lie_derivative(grid, zfield, xfield):
    """Lie derivative of a coordinate-component field along a vector field.

    Implements dX^k contraction plus transport,
    L_X = e(dx^m) i_(d/dx^k) dX^k/dx^m + X^k d/dx^k, with centered
    differences; metric-free, so valid on weighted grids as long as both
    inputs carry coordinate components.
    """
    n = grid.dim
    h = grid.spacing

    def ddx(f, a):
        return (np.roll(f, -1, axis=a) - np.roll(f, 1, axis=a)) / (2.0 * h[a])

    out = np.zeros_like(zfield)
    for k in range(n):
        out += xfield[..., k][..., None] * ddx(zfield, k)
        ik_z = interior_axis_field(zfield, n, k)
        for m in range(n):
            out += ddx(xfield[..., k], m)[..., None] \
                * exterior_axis_field(ik_z, n, m)
    return out
