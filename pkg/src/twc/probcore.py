"""Probability primitives and conditional-entropy / mutual-information functionals.

All quantities are in bits. Distributions are plain 1-D numpy arrays and
transition matrices are 2-D arrays with one row per input symbol; the
``check_*`` helpers validate and convert array-likes.

Conditional channels ``cond`` used by the entropy functionals are 3-D arrays
indexed ``cond[x, z, y] = P(y | x, z)``.
"""
import numpy as np
from scipy.special import entr

PROB_TOL = 1e-9
_LN2 = np.log(2.0)


class ProbabilityError(ValueError):
    """Raised when an array is not a valid distribution or has the wrong shape."""


def check_dist(p, n=None, tol=PROB_TOL):
    """Return ``p`` as a float array after checking it lies on the simplex."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ProbabilityError(f"distribution must be a nonempty 1-D array, got shape {p.shape}")
    if n is not None and p.size != n:
        raise ProbabilityError(f"distribution has {p.size} entries, expected {n}")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ProbabilityError("distribution has negative or non-finite entries")
    if abs(p.sum() - 1.0) > tol:
        raise ProbabilityError(f"distribution sums to {p.sum():.12g}, not 1")
    return p


def check_stochastic(w, n_in=None, tol=PROB_TOL):
    """Return ``w`` as a row-stochastic float matrix."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or 0 in w.shape:
        raise ProbabilityError(f"transition matrix must be a nonempty 2-D array, got shape {w.shape}")
    if n_in is not None and w.shape[0] != n_in:
        raise ProbabilityError(f"transition matrix has {w.shape[0]} rows, expected {n_in}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ProbabilityError("transition matrix has negative or non-finite entries")
    bad = np.flatnonzero(np.abs(w.sum(axis=1) - 1.0) > tol)
    if bad.size:
        raise ProbabilityError(f"row {bad[0]} of transition matrix sums to {w[bad[0]].sum():.12g}")
    return w


def check_joint(pxz, shape=None, tol=PROB_TOL):
    """Return ``pxz`` as a 2-D joint pmf."""
    pxz = np.asarray(pxz, dtype=float)
    if pxz.ndim != 2:
        raise ProbabilityError(f"joint distribution must be 2-D, got shape {pxz.shape}")
    if shape is not None and pxz.shape != tuple(shape):
        raise ProbabilityError(f"joint distribution has shape {pxz.shape}, expected {tuple(shape)}")
    if np.any(pxz < 0) or abs(pxz.sum() - 1.0) > tol:
        raise ProbabilityError("joint distribution must be nonnegative and sum to 1")
    return pxz


def check_cond(cond, nx=None, nz=None, tol=PROB_TOL):
    """Return ``cond`` as a 3-D array whose ``[x, z]`` slices are pmfs over y."""
    cond = np.asarray(cond, dtype=float)
    if cond.ndim != 3:
        raise ProbabilityError(f"conditional channel must be 3-D [x, z, y], got shape {cond.shape}")
    if (nx is not None and cond.shape[0] != nx) or (nz is not None and cond.shape[1] != nz):
        raise ProbabilityError(f"conditional channel shape {cond.shape} does not match ({nx}, {nz}, ·)")
    if np.any(cond < 0) or np.any(np.abs(cond.sum(axis=2) - 1.0) > tol):
        raise ProbabilityError("conditional channel slices must be pmfs")
    return cond


def check_permutation(perm, n=None):
    """Return ``perm`` as an int array after checking it is a bijection on range(n)."""
    perm = np.asarray(perm)
    if perm.ndim != 1 or (n is not None and perm.size != n):
        raise ProbabilityError(f"permutation must have length {n}, got shape {perm.shape}")
    if not np.array_equal(np.sort(perm), np.arange(perm.size)):
        raise ProbabilityError(f"{perm.tolist()} is not a permutation of 0..{perm.size - 1}")
    return perm.astype(int)


def _h(p, axis=-1):
    # entropy in bits along ``axis`` without validation; 0 log 0 = 0
    return entr(p).sum(axis=axis) / _LN2


def entropy(d):
    """Shannon entropy of a pmf in bits.

    >>> entropy([0.5, 0.5])
    1.0
    """
    return float(_h(check_dist(d)))


def binary_entropy(p):
    """Binary entropy function ``H_b(p)`` in bits."""
    return entropy([p, 1.0 - p])


def functional_H(pxz, cond):
    """Conditional entropy ``H(Y | X, Z)`` under ``P(x, z) P(y | x, z)``.

    Parameters
    ----------
    pxz : array, shape (nx, nz)
        Joint pmf of the conditioning pair.
    cond : array, shape (nx, nz, ny)
        ``cond[x, z]`` is the output pmf given ``(x, z)``.
    """
    pxz = check_joint(pxz)
    cond = check_cond(cond, *pxz.shape)
    return float(np.sum(pxz * _h(cond)))


def _mix_rows(pz_given_x, cond):
    # P(y | x) = sum_z P(z | x) P(y | x, z)
    return np.einsum("xz,xzy->xy", pz_given_x, cond)


def functional_Hbar(px, pz_given_x, cond):
    """Conditional entropy ``H(Y | X)`` after averaging the side input out.

    The side input ``Z`` is drawn from ``pz_given_x[x]``, so the effective
    channel is ``P(y | x) = sum_z P(y | x, z) P(z | x)``.
    """
    px = check_dist(px)
    pz_given_x = check_stochastic(pz_given_x, n_in=px.size)
    cond = check_cond(cond, px.size, pz_given_x.shape[1])
    return float(px @ _h(_mix_rows(pz_given_x, cond)))


def functional_Hperp(px, pz, cond):
    """``functional_Hbar`` specialised to a side input independent of ``X``."""
    px = check_dist(px)
    pz = check_dist(pz)
    cond = check_cond(cond, px.size, pz.size)
    q = np.einsum("z,xzy->xy", pz, cond)
    return float(px @ _h(q))


def _mi_rows(px, w):
    # per-row divergences D(w[x] || px @ w) in bits; px may be batched (..., n)
    q = np.maximum(px @ w, np.finfo(float).tiny)
    logq = np.log2(q)[..., None, :]
    logratio = np.where(w > 0, np.log2(np.where(w > 0, w, 1.0)) - logq, 0.0)
    return np.sum(w * logratio, axis=-1)


def mutual_information(px, w):
    """Unchecked, batch-capable ``I(X; Y)``: ``px`` may have shape (..., n_in)."""
    px = np.asarray(px, dtype=float)
    d = np.where(px > 0, _mi_rows(px, w), 0.0)
    return np.sum(px * d, axis=-1)


def functional_I(px, chan):
    """Mutual information ``I(X; Y)`` in bits for input pmf ``px`` and channel ``chan``.

    >>> round(functional_I([0.5, 0.5], [[1, 0], [0, 1]]), 12)
    1.0
    """
    chan = check_stochastic(chan)
    px = check_dist(px, n=chan.shape[0])
    return max(float(mutual_information(px, chan)), 0.0)


def column_permutation_between(a, b, tol=PROB_TOL):
    """Find ``perm`` with ``a[:, perm[j]] == b[:, j]`` for every column j.

    Returns the lexicographically smallest such permutation as an int array,
    or ``None`` when the matrices are not column permutations of each other.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2:
        raise ProbabilityError(f"shape mismatch: {a.shape} vs {b.shape}")
    n = a.shape[1]
    # close[i, j]: column i of a equals column j of b
    close = np.all(np.abs(a[:, :, None] - b[:, None, :]) <= tol, axis=0)
    candidates = [np.flatnonzero(close[:, j]).tolist() for j in range(n)]
    if any(not c for c in candidates):
        return None
    perm = [-1] * n
    used = [False] * n

    def assign(j):
        if j == n:
            return True
        for i in candidates[j]:
            if not used[i]:
                used[i] = True
                perm[j] = i
                if assign(j + 1):
                    return True
                used[i] = False
        return False

    if not assign(0):
        return None
    return np.array(perm, dtype=int)

