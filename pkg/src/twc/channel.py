"""Discrete memoryless two-way channels.

A :class:`Twc` stores the transition tensor ``p[x1, x2, y1, y2] =
P(y1, y2 | x1, x2)``. Reading it in one direction with the other user's input
as a state gives a family of one-way channels (:func:`marginals`).
"""
import csv
import enum
import io
import json
import re
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import entr

from .probcore import PROB_TOL, check_joint, check_permutation, functional_I

_LN2 = np.log(2.0)


class ChannelError(ValueError):
    """Invalid channel tensor or channel file."""

    def __init__(self, message, slice_index=None):
        super().__init__(message)
        self.slice_index = slice_index


class Direction(enum.Enum):
    """Transmission direction: FORWARD is user 1 -> user 2 (output Y2, state X2)."""

    FORWARD = "forward"
    BACKWARD = "backward"

    @property
    def other(self):
        return Direction.BACKWARD if self is Direction.FORWARD else Direction.FORWARD


class RatePair(NamedTuple):
    r1: float
    r2: float


@dataclass(frozen=True, eq=False)
class Twc:
    """Validated two-way channel; build with :func:`validate`."""

    p: np.ndarray

    @property
    def nx1(self):
        return self.p.shape[0]

    @property
    def nx2(self):
        return self.p.shape[1]

    @property
    def ny1(self):
        return self.p.shape[2]

    @property
    def ny2(self):
        return self.p.shape[3]

    @property
    def shape(self):
        return self.p.shape

    def __eq__(self, other):
        return isinstance(other, Twc) and np.array_equal(self.p, other.p)

    def allclose(self, other, atol=1e-12):
        return self.shape == other.shape and np.allclose(self.p, other.p, rtol=0, atol=atol)

    def __repr__(self):
        return f"Twc(nx1={self.nx1}, nx2={self.nx2}, ny1={self.ny1}, ny2={self.ny2})"


def validate(raw, tol=PROB_TOL):
    """Check a nested 4-index array and wrap it as a :class:`Twc`.

    Raises :class:`ChannelError` naming the first offending ``(x1, x2)`` slice.
    """
    try:
        p = np.array(raw, dtype=float)
    except ValueError as exc:
        raise ChannelError(f"ragged channel array: {exc}") from None
    if p.ndim != 4 or 0 in p.shape:
        raise ChannelError(f"channel array must be 4-D [x1][x2][y1][y2], got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ChannelError("channel array has non-finite entries")
    neg = np.argwhere(p < 0)
    if neg.size:
        x1, x2, y1, y2 = (int(i) for i in neg[0])
        raise ChannelError(
            f"negative probability {p[x1, x2, y1, y2]} at (x1,x2)=({x1},{x2}), (y1,y2)=({y1},{y2})",
            slice_index=(x1, x2),
        )
    sums = p.sum(axis=(2, 3))
    bad = np.argwhere(np.abs(sums - 1.0) > tol)
    if bad.size:
        x1, x2 = (int(i) for i in bad[0])
        raise ChannelError(
            f"slice (x1,x2)=({x1},{x2}) sums to {sums[x1, x2]:.12g}, expected 1 within {tol:g}",
            slice_index=(x1, x2),
        )
    p.setflags(write=False)
    return Twc(p)


def output_marginal(twc, direction):
    """Channel to the receiving user as a 3-D array ``[x1, x2, y]``."""
    if direction is Direction.FORWARD:
        return twc.p.sum(axis=2)
    return twc.p.sum(axis=3)


def marginals(twc, direction):
    """One-way channels with state for ``direction``, one matrix per state symbol.

    Forward: ``[P(y2 | x1, x2)]`` for each x2, rows indexed by x1.
    Backward: ``[P(y1 | x1, x2)]`` for each x1, rows indexed by x2.
    """
    out = output_marginal(twc, direction)
    if direction is Direction.FORWARD:
        return [out[:, x2, :] for x2 in range(twc.nx2)]
    return [out[x1, :, :] for x1 in range(twc.nx1)]


def stacked_marginals(twc, direction):
    """:func:`marginals` as one array ``[state, input, output]``."""
    out = output_marginal(twc, direction)
    if direction is Direction.FORWARD:
        return np.ascontiguousarray(out.transpose(1, 0, 2))
    return out


def cell_entropies(twc, direction):
    """``H(Y | x1, x2)`` of the receiving output, as an array ``[x1, x2]``."""
    return entr(output_marginal(twc, direction)).sum(axis=2) / _LN2


def swap_users(twc):
    """Exchange the roles of users 1 and 2."""
    return Twc(np.ascontiguousarray(twc.p.transpose(1, 0, 3, 2)))


def conditional_mi(twc, joint, direction):
    """``I(X1; Y2 | X2)`` (forward) or ``I(X2; Y1 | X1)`` (backward) under ``joint``.

    States with zero probability contribute nothing.
    """
    joint = check_joint(joint, shape=(twc.nx1, twc.nx2))
    if direction is Direction.BACKWARD:
        return conditional_mi(swap_users(twc), joint.T, Direction.FORWARD)
    total = 0.0
    for x2, w in enumerate(marginals(twc, Direction.FORWARD)):
        ps = joint[:, x2].sum()
        if ps > 0:
            total += ps * functional_I(joint[:, x2] / ps, w)
    return total


def conditional_mi_batch(twc, joints, direction):
    """Vectorised :func:`conditional_mi` over joints of shape ``(..., nx1, nx2)``.

    No validation; intended for grid sweeps.
    """
    joints = np.asarray(joints, dtype=float)
    if direction is Direction.BACKWARD:
        return conditional_mi_batch(swap_users(twc), np.swapaxes(joints, -1, -2), Direction.FORWARD)
    w = output_marginal(twc, Direction.FORWARD)  # [x1, x2, y2]
    h_cell = entr(w).sum(axis=2)
    m = np.einsum("...ab,aby->...by", joints, w)
    h_y_given_state = entr(m).sum(axis=(-1, -2)) - entr(joints.sum(axis=-2)).sum(axis=-1)
    h_y_given_both = np.einsum("...ab,ab->...", joints, h_cell)
    return np.maximum((h_y_given_state - h_y_given_both) / _LN2, 0.0)


def relabel(twc, perms):
    """Relabel all four alphabets; ``perms`` is ``(pi_x1, pi_x2, pi_y1, pi_y2)``.

    Symbol ``a`` of each alphabet becomes ``pi[a]``.
    """
    if len(perms) != 4:
        raise ChannelError("relabel needs one permutation per alphabet (x1, x2, y1, y2)")
    p = twc.p
    for axis, (perm, n) in enumerate(zip(perms, p.shape)):
        try:
            perm = check_permutation(perm, n)
        except ValueError as exc:
            raise ChannelError(f"axis {axis}: {exc}") from None
        p = np.take(p, np.argsort(perm), axis=axis)
    return validate(p)


_EXAMPLE1 = [
    [0.783, 0.087, 0.117, 0.013],
    [0.0417, 0.3753, 0.0583, 0.5247],
    [0.261, 0.609, 0.039, 0.091],
    [0.2919, 0.1251, 0.4081, 0.1749],
]
_EXAMPLE2 = [
    [0.783, 0.087, 0.117, 0.013],
    [0.36279, 0.05421, 0.50721, 0.07579],
    [0.261, 0.609, 0.039, 0.091],
    [0.173889, 0.243111, 0.243111, 0.339889],
]


def from_table(table, nx1, nx2, ny1, ny2, tol=PROB_TOL):
    """Build a channel from a table with rows ``(x1, x2)`` and columns ``(y1, y2)``, both lexicographic."""
    table = np.asarray(table, dtype=float)
    if table.shape != (nx1 * nx2, ny1 * ny2):
        raise ChannelError(f"table shape {table.shape} does not match alphabets ({nx1},{nx2},{ny1},{ny2})")
    return validate(table.reshape(nx1, nx2, ny1, ny2), tol=tol)


def to_table(twc):
    return twc.p.reshape(twc.nx1 * twc.nx2, twc.ny1 * twc.ny2)


def bin_additive(eps):
    """Binary additive-noise channel ``Y1 = Y2 = X1 xor X2 xor Z`` with ``Z ~ Bernoulli(eps)``."""
    if not 0.0 <= eps <= 1.0:
        raise ChannelError(f"noise probability {eps} outside [0, 1]")
    p = np.zeros((2, 2, 2, 2))
    for x1 in range(2):
        for x2 in range(2):
            clean = x1 ^ x2
            p[x1, x2, clean, clean] = 1.0 - eps
            p[x1, x2, 1 - clean, 1 - clean] += eps
    return validate(p)


def builtin(name):
    """Named fixture channel: ``example1``, ``example2`` or ``bin-additive:<eps>``."""
    if name == "example1":
        return from_table(_EXAMPLE1, 2, 2, 2, 2)
    if name == "example2":
        return from_table(_EXAMPLE2, 2, 2, 2, 2)
    m = re.fullmatch(r"bin-additive[:(]\s*([0-9eE.+-]+)\s*\)?", name)
    if m:
        try:
            eps = float(m.group(1))
        except ValueError:
            raise ChannelError(f"bad noise level in {name!r}") from None
        return bin_additive(eps)
    raise ChannelError(f"unknown builtin channel {name!r}; expected example1, example2 or bin-additive:<eps>")


def to_json(twc):
    doc = {"x1": twc.nx1, "x2": twc.nx2, "y1": twc.ny1, "y2": twc.ny2, "p": twc.p.tolist()}
    return json.dumps(doc)


def from_json(text, tol=PROB_TOL):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "p" not in doc:
        raise ChannelError('channel JSON must be an object with keys "x1", "x2", "y1", "y2", "p"')
    twc = validate(doc["p"], tol=tol)
    declared = tuple(doc.get(k, n) for k, n in zip(("x1", "x2", "y1", "y2"), twc.shape))
    if declared != twc.shape:
        raise ChannelError(f"declared alphabet sizes {declared} do not match p with shape {twc.shape}")
    return twc


def _symbol_pair(label):
    # "01" -> (0, 1); "10.3" -> (10, 3) for alphabets larger than ten
    label = label.strip()
    parts = label.split(".") if "." in label else list(label)
    if len(parts) != 2 or not all(s.isdigit() for s in parts):
        raise ChannelError(f"bad symbol-pair label {label!r}")
    return int(parts[0]), int(parts[1])


def _pair_label(a, b, wide):
    return f"{a}.{b}" if wide else f"{a}{b}"


def to_csv(twc):
    """Bordermatrix CSV: header ``x1x2,y1y2=00,01,...``, then one labelled row per ``(x1, x2)``."""
    wide_y = max(twc.ny1, twc.ny2) > 10
    wide_x = max(twc.nx1, twc.nx2) > 10
    cols = [_pair_label(a, b, wide_y) for a in range(twc.ny1) for b in range(twc.ny2)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x1x2", "y1y2=" + cols[0], *cols[1:]])
    for (x1, x2), row in zip(np.ndindex(twc.nx1, twc.nx2), to_table(twc)):
        writer.writerow([_pair_label(x1, x2, wide_x), *(repr(float(v)) for v in row)])
    return buf.getvalue()


def from_csv(text, tol=PROB_TOL):
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if len(rows) < 2:
        raise ChannelError("channel CSV needs a header row and at least one data row")
    header = [c.strip() for c in rows[0]]
    if len(header) < 2 or not header[1].startswith("y1y2="):
        raise ChannelError('channel CSV header must look like "x1x2,y1y2=00,01,..."')
    cols = [_symbol_pair(header[1][len("y1y2="):])] + [_symbol_pair(c) for c in header[2:]]
    row_labels = [_symbol_pair(r[0]) for r in rows[1:]]
    ny1, ny2 = (max(c[i] for c in cols) + 1 for i in range(2))
    nx1, nx2 = (max(r[i] for r in row_labels) + 1 for i in range(2))
    if cols != [(a, b) for a in range(ny1) for b in range(ny2)]:
        raise ChannelError("output columns must list every (y1, y2) pair in lexicographic order")
    if row_labels != [(a, b) for a in range(nx1) for b in range(nx2)]:
        raise ChannelError("rows must list every (x1, x2) pair in lexicographic order")
    try:
        table = [[float(c) for c in r[1:]] for r in rows[1:]]
    except ValueError as exc:
        raise ChannelError(f"non-numeric entry: {exc}") from None
    if any(len(r) != ny1 * ny2 for r in table):
        raise ChannelError("every row needs one entry per (y1, y2) column")
    return from_table(table, nx1, nx2, ny1, ny2, tol=tol)


def load(path, tol=PROB_TOL):
    """Read a channel from a ``.json`` or ``.csv`` file (format by suffix, JSON otherwise)."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if str(path).lower().endswith(".csv"):
        return from_csv(text, tol=tol)
    return from_json(text, tol=tol)
