"""Hodge Laplacians, matrix-free CG solves, harmonic representatives,
Hodge decomposition and Betti numbers on TorusGrid cochains.

Solves use conjugate gradients in the weighted inner product; the systems
are consistent by construction (right-hand sides are orthogonal to the
relevant kernels), so no explicit deflation is required on the standard
paths.  Dense or sparse assembly is reserved for small grids (Betti counts
and test oracles).
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .grid import Cochain, GridOperator

__all__ = [
    "HodgeSolveOptions",
    "SolveFailure",
    "NotClosedError",
    "AmbiguousSpectralGap",
    "laplacian",
    "harmonic_representative",
    "hodge_decompose",
    "betti",
    "coboundary_matrix",
    "weight_diagonal",
]


@dataclass
class HodgeSolveOptions:
    cg_tolerance: float = 1e-10
    max_iterations: int = 5000
    deflation: bool = True

    def __post_init__(self):
        if not 0.0 < self.cg_tolerance < 1.0:
            raise ValueError("cg_tolerance must lie in (0, 1)")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


class SolveFailure(RuntimeError):
    """CG failed to reach the requested tolerance; carries the trace."""

    def __init__(self, message, residual_trace):
        super().__init__(message)
        self.residual_trace = residual_trace


class NotClosedError(ValueError):
    """Input cochain is not closed; carries the residual report."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class AmbiguousSpectralGap(RuntimeError):
    pass


def cg(apply_op, b, inner, tol, maxiter, x0=None):
    """Conjugate gradients for a self-adjoint PSD operator in `inner`.

    Returns (x, iterations, residual_trace); raises SolveFailure when the
    relative residual does not reach tol within maxiter iterations.
    """
    x = np.zeros_like(b) if x0 is None else x0.copy()
    r = b - apply_op(x) if x0 is not None else b.copy()
    bnorm = np.sqrt(max(inner(b, b), 0.0))
    if bnorm == 0.0:
        return np.zeros_like(b), 0, [0.0]
    p = r.copy()
    rs = inner(r, r)
    trace = [float(np.sqrt(rs) / bnorm)]
    if trace[-1] <= tol:
        return x, 0, trace
    for it in range(1, maxiter + 1):
        Ap = apply_op(p)
        pAp = inner(p, Ap)
        if pAp <= 0.0:
            # numerically singular direction: accept current iterate
            break
        alpha = rs / pAp
        x = x + alpha * p
        r = r - alpha * Ap
        rs_new = inner(r, r)
        trace.append(float(np.sqrt(rs_new) / bnorm))
        if trace[-1] <= tol:
            return x, it, trace
        p = r + (rs_new / rs) * p
        rs = rs_new
    if trace[-1] <= tol:
        return x, len(trace) - 1, trace
    raise SolveFailure(
        f"CG stalled at relative residual {trace[-1]:.3e} "
        f"after {len(trace) - 1} iterations (tol {tol:.1e})",
        trace,
    )


def laplacian(grid, k):
    """Hodge Laplacian d*d + dd* as a matrix-free GridOperator."""

    def apply_values(v):
        out = np.zeros_like(v)
        if k < grid.dim:
            out += grid.delta_apply(k + 1, grid.d_apply(k, v))
        if k > 0:
            out += grid.d_apply(k - 1, grid.delta_apply(k, v))
        return out

    return GridOperator(grid, k, k, apply_values, name=f"laplacian_{k}")


def _closedness_residual(f):
    if f.degree >= f.grid.dim:
        return 0.0
    scale = max(1.0, f.norm())
    return f.d().norm() / scale


def harmonic_representative(f, opts=None):
    """Harmonic representative of a closed cochain's cohomology class.

    Solves the normal equation delta d alpha = delta f by CG and returns
    h = f - d alpha, which satisfies dh = 0 identically (h differs from f
    by an exact cochain) and d*h = 0 up to the CG tolerance.
    """
    opts = opts or HodgeSolveOptions()
    res = _closedness_residual(f)
    if res > 1e-10:
        raise NotClosedError(
            f"input is not closed: relative coboundary norm {res:.3e}", res)
    grid = f.grid
    k = f.degree
    if k == 0:
        return f.copy()

    wkm = grid.star_weights(k - 1)

    def apply_op(v):
        return grid.delta_apply(k, grid.d_apply(k - 1, v))

    def inner(u, v):
        return float(np.sum(wkm * u * v))

    b = grid.delta_apply(k, f.values)
    alpha, _, _ = cg(apply_op, b, inner, opts.cg_tolerance,
                     opts.max_iterations)
    return f - Cochain(grid, k, grid.d_apply(k - 1, alpha))


def hodge_decompose(c, opts=None):
    """Split c = exact + coexact + harmonic for the weighted inner product."""
    opts = opts or HodgeSolveOptions()
    grid = c.grid
    k = c.degree

    if k > 0:
        wkm = grid.star_weights(k - 1)
        alpha, _, _ = cg(
            lambda v: grid.delta_apply(k, grid.d_apply(k - 1, v)),
            grid.delta_apply(k, c.values),
            lambda u, v: float(np.sum(wkm * u * v)),
            opts.cg_tolerance, opts.max_iterations,
        )
        exact = Cochain(grid, k, grid.d_apply(k - 1, alpha))
    else:
        exact = grid.zeros(k)

    if k < grid.dim:
        wkp = grid.star_weights(k + 1)
        beta, _, _ = cg(
            lambda v: grid.d_apply(k, grid.delta_apply(k + 1, v)),
            grid.d_apply(k, c.values),
            lambda u, v: float(np.sum(wkp * u * v)),
            opts.cg_tolerance, opts.max_iterations,
        )
        coexact = Cochain(grid, k, grid.delta_apply(k + 1, beta))
    else:
        coexact = grid.zeros(k)

    harmonic = c - exact - coexact
    return exact, coexact, harmonic


def coboundary_matrix(grid, k):
    """Sparse matrix of d_k on flattened values (integer entries)."""
    tt, ss, ax, sg = grid._terms(k)
    M = grid.ncells_top
    n_out = len(grid.subsets(k + 1)) * M
    n_in = len(grid.subsets(k)) * M
    rows, cols, data = [], [], []
    base = np.arange(M, dtype=np.int64)
    for r in range(tt.shape[0]):
        t, s, a, g = tt[r], ss[r], ax[r], sg[r]
        rows.append(t * M + base)
        cols.append(s * M + grid._idx_plus[a])
        data.append(np.full(M, g))
        rows.append(t * M + base)
        cols.append(s * M + base)
        data.append(np.full(M, -g))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    data = np.concatenate(data)
    return sp.csr_matrix((data, (rows, cols)), shape=(n_out, n_in))


def weight_diagonal(grid, k):
    return grid.star_weights(k).ravel()


def betti(grid, k, opts=None, gap_threshold=1e-6):
    """dim ker of the degree-k Hodge Laplacian by near-zero eigenvalue count.

    Counts eigenvalues below gap_threshold relative to the smallest clearly
    nonzero one; raises AmbiguousSpectralGap when the separation is not
    clean.  Desk-scale grids only (sparse shift-invert factorization).
    """
    del opts
    wk = weight_diagonal(grid, k)
    sqw = np.sqrt(wk)
    N = wk.shape[0]
    L = None
    if k < grid.dim:
        D = coboundary_matrix(grid, k)
        wkp = weight_diagonal(grid, k + 1)
        B = D.multiply((1.0 / sqw)[None, :]).tocsr()
        up = (B.T.multiply(wkp[None, :]) @ B).tocsr()
        L = up
    if k > 0:
        Dm = coboundary_matrix(grid, k - 1)
        wkm = weight_diagonal(grid, k - 1)
        G = Dm.T.multiply(sqw[None, :]).T.tocsr()  # W^(1/2)-scaled transpose
        down = (G @ sp.diags(1.0 / wkm) @ G.T).tocsr()
        L = down if L is None else L + down

    from math import comb

    expect = comb(grid.dim, k)
    K = min(N - 2, expect + 4)
    scale = float(L.diagonal().max())
    v0 = np.full(N, 1.0 / np.sqrt(N))
    vals = spla.eigsh(L, k=K, sigma=-1e-3 * scale, which="LM", v0=v0,
                      return_eigenvectors=False)
    lam = np.sort(np.abs(vals))
    ref = lam[-1]
    if ref <= 0:
        raise AmbiguousSpectralGap("all computed eigenvalues vanish")
    zero = lam[lam <= gap_threshold * ref]
    nonzero = lam[lam > gap_threshold * ref]
    if nonzero.size == 0:
        raise AmbiguousSpectralGap(
            "no nonzero eigenvalue among computed ones; increase K")
    if zero.size and zero.max() > gap_threshold * nonzero.min():
        raise AmbiguousSpectralGap(
            f"unclear kernel separation: candidate zero {zero.max():.3e} vs "
            f"nonzero {nonzero.min():.3e}")
    return int(zero.size)
