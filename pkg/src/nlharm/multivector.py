"""Pointwise exterior and Clifford algebra over an oriented inner-product
space of dimension n <= 4.

Basis convention
----------------
A multivector in dimension n has 2**n coefficients indexed by subsets of the
axis set {0, ..., n-1}.  The index of a subset S is its bitmask
(sum of 2**i for i in S), and the basis element for S is the wedge of the
coordinate covectors in ascending axis order, e.g. for n = 4 the index
0b0011 = 3 carries e^1 ^ e^2 (axes are reported 1-based in user-facing
strings).  All sign tables are derived from this single convention.

The Hodge star is fixed so that star(e^1 ^ ... ^ e^k) = e^(k+1) ^ ... ^ e^n
on an oriented orthonormal frame, which makes <a, a> dvol = a ^ star(a) hold
with a plus sign in every degree.

Functions suffixed ``_field`` operate on arrays of shape (..., 2**n) and are
the vectorized building blocks used by the grid modules; the MultiVector
class wraps a single point.
"""

from functools import lru_cache

import numpy as np

__all__ = [
    "MultiVector",
    "InnerProduct",
    "wedge",
    "interior",
    "clifford",
    "clifford_hat",
    "hodge_star",
    "pfaffian",
    "pfaffian_polar",
    "sd_asd_split",
    "wedge_field",
    "interior_axis_field",
    "exterior_axis_field",
    "clifford_axis_field",
    "star_field",
    "pf_field",
    "pf_polar_field",
    "grades",
    "subsets_of_size",
    "mask_of_axes",
    "axes_of_mask",
]

_MAX_DIM = 4


def _check_dim(n):
    if n not in (2, 3, 4):
        raise ValueError(f"dimension must be 2, 3 or 4, got {n}")


def mask_of_axes(axes):
    """Bitmask of an iterable of 0-based axes."""
    m = 0
    for a in axes:
        m |= 1 << a
    return m


def axes_of_mask(mask):
    """Sorted tuple of 0-based axes in a bitmask."""
    return tuple(i for i in range(_MAX_DIM) if mask >> i & 1)


@lru_cache(maxsize=None)
def grades(n):
    """Array of length 2**n with the degree (popcount) of each index."""
    return np.array([bin(m).count("1") for m in range(1 << n)], dtype=np.int64)


@lru_cache(maxsize=None)
def subsets_of_size(n, k):
    """Masks of the k-subsets of {0..n-1} in lexicographic axis order."""
    out = []

    def rec(start, chosen):
        if len(chosen) == k:
            out.append(mask_of_axes(chosen))
            return
        for a in range(start, n):
            rec(a + 1, chosen + [a])

    rec(0, [])
    return tuple(out)


def _shuffle_sign(i, j):
    # (-1)**#{(p, q) in i x j : p > q} for disjoint masks i, j
    inv = 0
    for q in range(_MAX_DIM):
        if j >> q & 1:
            inv += bin(i >> (q + 1)).count("1")
    return -1 if inv & 1 else 1


@lru_cache(maxsize=None)
def _wedge_terms(n):
    """All (i, j, i|j, sign) with i, j disjoint masks, in fixed order."""
    ii, jj, kk, ss = [], [], [], []
    for i in range(1 << n):
        for j in range(1 << n):
            if i & j:
                continue
            ii.append(i)
            jj.append(j)
            kk.append(i | j)
            ss.append(_shuffle_sign(i, j))
    return (
        np.array(ii, dtype=np.int64),
        np.array(jj, dtype=np.int64),
        np.array(kk, dtype=np.int64),
        np.array(ss, dtype=np.float64),
    )


@lru_cache(maxsize=None)
def _axis_pairs(n, axis):
    """Masks without `axis` and the sign linking m <-> m | bit(axis)."""
    bit = 1 << axis
    lower = np.array([m for m in range(1 << n) if not m & bit], dtype=np.int64)
    sig = np.array([_shuffle_sign(bit, m) for m in lower], dtype=np.float64)
    return lower, sig


@lru_cache(maxsize=None)
def _star_table(n):
    """comp[m] = complementary mask, sign[m] = perm sign of (S, S^c)."""
    full = (1 << n) - 1
    comp = np.array([full ^ m for m in range(1 << n)], dtype=np.int64)
    sign = np.array(
        [_shuffle_sign(m, full ^ m) for m in range(1 << n)], dtype=np.float64
    )
    return comp, sign


# ---------------------------------------------------------------------------
# vectorized field operations, arrays of shape (..., 2**n)
# ---------------------------------------------------------------------------

def wedge_field(A, B, n):
    """Graded exterior product of coefficient arrays (..., 2**n)."""
    ii, jj, kk, ss = _wedge_terms(n)
    out = np.zeros(np.broadcast_shapes(A.shape, B.shape), dtype=np.float64)
    for i, j, k, s in zip(ii, jj, kk, ss):
        out[..., k] += s * A[..., i] * B[..., j]
    return out


def interior_axis_field(A, n, axis):
    """Interior product with the orthonormal frame vector of `axis`."""
    lower, sig = _axis_pairs(n, axis)
    out = np.zeros_like(A)
    out[..., lower] = A[..., lower | (1 << axis)] * sig
    return out


def exterior_axis_field(A, n, axis):
    """Left wedge with the coordinate covector of `axis`."""
    lower, sig = _axis_pairs(n, axis)
    out = np.zeros_like(A)
    out[..., lower | (1 << axis)] = A[..., lower] * sig
    return out


def clifford_axis_field(A, n, axis, hat=False):
    """Apply c(w^axis) (or c-hat with hat=True) to a coefficient array."""
    lower, sig = _axis_pairs(n, axis)
    upper = lower | (1 << axis)
    out = np.empty_like(A)
    out[..., upper] = A[..., lower] * sig
    out[..., lower] = (A[..., upper] * sig) if hat else (-A[..., upper] * sig)
    return out


def star_field(A, n, orientation=1):
    """Euclidean Hodge star on orthonormal components."""
    comp, sign = _star_table(n)
    out = np.empty_like(A)
    out[..., comp] = A * (orientation * sign)
    return out


_PF_TERMS = ((3, 12, 1.0), (5, 10, -1.0), (9, 6, 1.0))  # {12}{34} -{13}{24} {14}{23}


def pf_field(Z):
    """Pfaffian of degree-2 components in dimension 4, shape (..., 16)."""
    out = np.zeros(Z.shape[:-1], dtype=np.float64)
    for i, j, s in _PF_TERMS:
        out += s * Z[..., i] * Z[..., j]
    return out


def pf_polar_field(Z, V):
    """Polarization pf(Z+V) - pf(Z) - pf(V); symmetric bilinear."""
    out = np.zeros(np.broadcast_shapes(Z.shape, V.shape)[:-1], dtype=np.float64)
    for i, j, s in _PF_TERMS:
        out += s * (Z[..., i] * V[..., j] + V[..., i] * Z[..., j])
    return out


# ---------------------------------------------------------------------------
# single-point API
# ---------------------------------------------------------------------------

class MultiVector:
    """Immutable exterior-algebra element: 2**dim coefficients by bitmask."""

    __slots__ = ("dim", "coeffs")

    def __init__(self, dim, coeffs=None):
        _check_dim(dim)
        object.__setattr__(self, "dim", dim)
        if coeffs is None:
            c = np.zeros(1 << dim, dtype=np.float64)
        else:
            c = np.asarray(coeffs, dtype=np.float64).copy()
            if c.shape != (1 << dim,):
                raise ValueError(
                    f"expected {1 << dim} coefficients for dim {dim}, got {c.shape}"
                )
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("MultiVector is immutable")

    @classmethod
    def basis(cls, dim, axes, value=1.0):
        """Basis k-vector for 1-based axis tuple, e.g. basis(4, (1, 2))."""
        c = np.zeros(1 << dim)
        c[mask_of_axes(a - 1 for a in axes)] = value
        return cls(dim, c)

    @classmethod
    def scalar(cls, dim, value):
        c = np.zeros(1 << dim)
        c[0] = value
        return cls(dim, c)

    def coeff(self, axes):
        """Coefficient of the basis element for 1-based axes, e.g. (1, 2)."""
        return float(self.coeffs[mask_of_axes(a - 1 for a in axes)])

    def degree_part(self, k):
        c = np.where(grades(self.dim) == k, self.coeffs, 0.0)
        return MultiVector(self.dim, c)

    def is_pure_degree(self, k, tol=0.0):
        other = self.coeffs[grades(self.dim) != k]
        return np.all(np.abs(other) <= tol)

    def norm2(self, ip=None):
        if ip is None:
            return float(np.sum(self.coeffs**2))
        return ip.inner(self, self)

    def __add__(self, other):
        self._compat(other)
        return MultiVector(self.dim, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._compat(other)
        return MultiVector(self.dim, self.coeffs - other.coeffs)

    def __mul__(self, s):
        return MultiVector(self.dim, self.coeffs * float(s))

    __rmul__ = __mul__

    def __neg__(self):
        return MultiVector(self.dim, -self.coeffs)

    def _compat(self, other):
        if not isinstance(other, MultiVector) or other.dim != self.dim:
            raise ValueError("dimension mismatch between multivectors")

    def __repr__(self):
        parts = []
        for m in range(1 << self.dim):
            v = self.coeffs[m]
            if v != 0.0:
                label = "1" if m == 0 else "e" + "".join(
                    str(a + 1) for a in axes_of_mask(m)
                )
                parts.append(f"{v:+g}*{label}")
        return "MV(" + (" ".join(parts) if parts else "0") + ")"


class InnerProduct:
    """Pointwise inner product from a symmetric positive-definite metric.

    The metric acts on vectors; the induced inner product on k-covectors is
    the usual one (product of inverse metric factors in the diagonal case).
    Diagonal metrics are the fast path; a general symmetric metric is handled
    by an orthonormalizing change of basis computed once at construction.
    """

    def __init__(self, dim, metric=None):
        _check_dim(dim)
        self.dim = dim
        if metric is None:
            metric = np.ones(dim)
        metric = np.asarray(metric, dtype=np.float64)
        if metric.ndim == 1:
            if metric.shape != (dim,) or np.any(metric <= 0):
                raise ValueError("diagonal metric needs dim positive entries")
            self.diag = metric.copy()
            self._basis_change = None
        elif metric.shape == (dim, dim):
            if not np.allclose(metric, metric.T, atol=1e-12):
                raise ValueError("metric must be symmetric")
            w, V = np.linalg.eigh(metric)
            if np.any(w <= 0):
                raise ValueError("metric must be positive definite")
            self.diag = None
            # columns of E = V diag(w^-1/2) form a g-orthonormal vector basis
            self._basis_change = V * (w**-0.5)
            self._metric = metric.copy()
        else:
            raise ValueError("metric must be a vector or a square matrix")

    @property
    def is_diagonal(self):
        return self.diag is not None

    def covector_weights(self):
        """Per-mask weight of <e^S, e^S>: product of inverse metric factors."""
        if not self.is_diagonal:
            raise ValueError("covector_weights needs a diagonal metric")
        n = self.dim
        w = np.ones(1 << n)
        for a in range(n):
            bit = 1 << a
            for m in range(1 << n):
                if m & bit:
                    w[m] /= self.diag[a]
        return w

    def volume(self):
        det = np.prod(self.diag) if self.is_diagonal else np.linalg.det(self._metric)
        return float(np.sqrt(det))

    def to_orthonormal(self, mv):
        """Components of mv in an orthonormal coframe of this metric."""
        if self.is_diagonal:
            n = self.dim
            scale = np.ones(1 << n)
            for a in range(n):
                bit = 1 << a
                for m in range(1 << n):
                    if m & bit:
                        scale[m] /= np.sqrt(self.diag[a])
            return MultiVector(mv.dim, mv.coeffs * scale)
        return MultiVector(mv.dim, self._induced_map() @ mv.coeffs)

    def _induced_map(self):
        # exterior powers of the coframe change dual to the orthonormal basis
        n = self.dim
        E = self._basis_change
        M = np.zeros((1 << n, 1 << n))
        M[0, 0] = 1.0
        for k in range(1, n + 1):
            for mdst in subsets_of_size(n, k):
                rows = axes_of_mask(mdst)
                for msrc in subsets_of_size(n, k):
                    cols = axes_of_mask(msrc)
                    M[mdst, msrc] = np.linalg.det(E[np.ix_(cols, rows)])
        return M

    def inner(self, a, b):
        if self.is_diagonal:
            w = self.covector_weights()
            return float(np.sum(w * a.coeffs * b.coeffs))
        ao = self.to_orthonormal(a)
        bo = self.to_orthonormal(b)
        return float(np.sum(ao.coeffs * bo.coeffs))


def wedge(a, b):
    """Graded exterior product; antisymmetric on 1-covectors."""
    a._compat(b)
    return MultiVector(a.dim, wedge_field(a.coeffs, b.coeffs, a.dim))


def interior(v, a, ip=None):
    """Interior product i_v a for a coordinate vector v (length dim).

    With inner product ip this is the adjoint of wedging with the metric
    dual of v.  The value itself is metric-free because v is a vector; ip
    only matters for interpreting the adjointness property.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (a.dim,):
        raise ValueError("vector length must match multivector dimension")
    out = np.zeros_like(a.coeffs)
    for axis in range(a.dim):
        if v[axis] != 0.0:
            out += v[axis] * interior_axis_field(a.coeffs, a.dim, axis)
    return MultiVector(a.dim, out)


def _covector_apply(omega, a, hat):
    omega = np.asarray(omega, dtype=np.float64)
    if omega.shape != (a.dim,):
        raise ValueError("covector length must match multivector dimension")
    out = np.zeros_like(a.coeffs)
    for axis in range(a.dim):
        if omega[axis] != 0.0:
            out += omega[axis] * clifford_axis_field(a.coeffs, a.dim, axis, hat=hat)
    return MultiVector(a.dim, out)


def clifford(omega, a):
    """c(omega) = e(omega) - i_(omega sharp) for an orthonormal covector."""
    return _covector_apply(omega, a, hat=False)


def clifford_hat(omega, a):
    """c-hat(omega) = e(omega) + i_(omega sharp); squares to +|omega|^2."""
    return _covector_apply(omega, a, hat=True)


def hodge_star(a, ip=None, orientation=1):
    """Hodge star with the given inner product and orientation sign."""
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    n = a.dim
    if ip is None or (ip.is_diagonal and np.all(ip.diag == 1.0)):
        return MultiVector(n, star_field(a.coeffs, n, orientation))
    if ip.is_diagonal:
        comp, sign = _star_table(n)
        w = ip.covector_weights()
        vol = ip.volume()
        out = np.empty_like(a.coeffs)
        out[comp] = orientation * sign * w * vol * a.coeffs
        return MultiVector(n, out)
    # general symmetric metric: orthonormalize, star, pull back
    M = ip._induced_map()
    flat = star_field(M @ a.coeffs, n, orientation)
    return MultiVector(n, np.linalg.solve(M, flat))


def pfaffian(z):
    """Pfaffian of a pure degree-2 multivector in dimension 4.

    wedge(z, z) = 2 * pfaffian(z) * e1234 exactly.
    """
    if z.dim != 4:
        raise ValueError("pfaffian requires dimension 4")
    if not z.is_pure_degree(2):
        raise ValueError("pfaffian requires a pure degree-2 multivector")
    return float(pf_field(z.coeffs))


def pfaffian_polar(z, v):
    """Symmetric bilinear polarization of the Pfaffian quadratic form."""
    z._compat(v)
    if z.dim != 4:
        raise ValueError("pfaffian polarization requires dimension 4")
    return float(pf_polar_field(z.coeffs, v.coeffs))


def sd_asd_split(z):
    """Split a degree-2 multivector in dimension 4 into (z+, z-) with
    star z+ = z+ and star z- = -z- (Euclidean inner product)."""
    if z.dim != 4:
        raise ValueError("self-dual split requires dimension 4")
    if not z.is_pure_degree(2):
        raise ValueError("self-dual split requires a pure degree-2 multivector")
    sz = star_field(z.coeffs, 4)
    return (
        MultiVector(4, 0.5 * (z.coeffs + sz)),
        MultiVector(4, 0.5 * (z.coeffs - sz)),
    )
