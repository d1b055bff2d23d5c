"""Entropy and mutual-information functionals on small hand-checkable cases."""
import numpy as np

from twc import binary_entropy, entropy, functional_H, functional_Hbar, functional_I
from twc.probcore import column_permutation_between

# binary entropy at the two noise levels that show up below
print("H_b(0.1) =", round(binary_entropy(0.1), 6))
print("H_b(0.3) =", round(binary_entropy(0.3), 6))
print("H(uniform on 4) =", entropy([0.25] * 4))

# a binary channel with rows (0.9, 0.1) and (0.3, 0.7)
w = np.array([[0.9, 0.1], [0.3, 0.7]])
print("I(uniform, W) =", round(functional_I([0.5, 0.5], w), 6))

# conditional entropy of Y given (X, Z), with Z trivial
cond = w[:, None, :]
print("H(Y|X) at uniform X =", round(functional_H([[0.5], [0.5]], cond), 6))

# averaging over a side input first: the effective row is the 50/50 mixture
cond2 = np.stack([w, w[::-1]])
print("Hbar with a fair side input =", round(functional_Hbar([1, 0], [[0.5, 0.5], [0.5, 0.5]], cond2), 6))

# swapping the output columns leaves mutual information unchanged
perm = column_permutation_between(w, w[:, ::-1])
print("column permutation:", perm, "| I unchanged:",
      np.isclose(functional_I([0.3, 0.7], w), functional_I([0.3, 0.7], w[:, ::-1])))

# I(p, W) is concave in p
ps = np.linspace(0, 1, 11)
vals = [functional_I([p, 1 - p], w) for p in ps]
print("second differences all <= 0:", bool(np.all(np.diff(vals, 2) <= 1e-12)))
