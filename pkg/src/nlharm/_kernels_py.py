"""Pure-numpy kernels, semantically and bit-identical to the compiled ones.

Both backends perform the same floating-point operations in the same order:
term-by-term accumulation for the coboundary stencils and a fixed three-term
sequence for the Pfaffian kernels.  Keeping the orders aligned lets the test
suite assert exact equality between backends.
"""

import numpy as np

BACKEND = "python"


def coboundary_apply(vals, out, term_t, term_s, term_axis, term_sign, idx_plus):
    """out[t] += sign * (vals[s] shifted forward along axis - vals[s])."""
    for r in range(term_t.shape[0]):
        t = term_t[r]
        s = term_s[r]
        a = term_axis[r]
        g = term_sign[r]
        src = vals[s]
        out[t] += g * (src[idx_plus[a]] - src)
    return out


def coboundary_transpose_apply(vals, out, term_t, term_s, term_axis, term_sign,
                               idx_minus):
    """out[s] += sign * (vals[t] shifted backward along axis - vals[t])."""
    for r in range(term_t.shape[0]):
        t = term_t[r]
        s = term_s[r]
        a = term_axis[r]
        g = term_sign[r]
        src = vals[t]
        out[s] += g * (src[idx_minus[a]] - src)
    return out


def pf4(Z, out):
    """Pfaffian of degree-2 rows of a (M, 16) component array."""
    np.multiply(Z[:, 3], Z[:, 12], out=out)
    out -= Z[:, 5] * Z[:, 10]
    out += Z[:, 9] * Z[:, 6]
    return out


def pf_polar4(Z, V, out):
    """Pfaffian polarization pf(Z+V)-pf(Z)-pf(V) on (M, 16) arrays."""
    np.multiply(Z[:, 3], V[:, 12], out=out)
    out += V[:, 3] * Z[:, 12]
    out -= Z[:, 5] * V[:, 10]
    out -= V[:, 5] * Z[:, 10]
    out += Z[:, 9] * V[:, 6]
    out += V[:, 9] * Z[:, 6]
    return out
