"""The Szego kernel on the 7-dimensional quaternionic Heisenberg group.

For each level k, the second-order operator behind the projection has,
at every nonzero frequency, exactly one null direction e1; the kernel is
the sphere integral of the rank-one projections onto it.
"""

import numpy as np

import steptwo as st

# Spectral data at level k = 2: diagonal weight pattern (1, 2, 1), a
# Hermitian PSD combination with a single vanishing eigenvalue.
data = st.szego_data(2, [0.3, -0.4, 0.5])
print("weight diagonal:", np.diag(data.M))
mat = data.psd_matrix()
print("eigenvalues of |tau| M + iD:", np.round(np.linalg.eigvalsh(mat), 10))
print("null vector annihilated:", np.abs(mat @ data.e1).max() < 1e-12)
print("projection is rank-one idempotent:", np.abs(data.P @ data.P - data.P).max() < 1e-12)

# Kernel at central coordinate zero: the sphere integral collapses to
# (24/pi^4) |y|^(-10) times the identity (level 1).
y = [1.0, 0.0, 0.0, 0.0]
res = st.szego_kernel(1, y, [0, 0, 0])
print("\nS(y, 0) for |y| = 1:")
print(np.round(res.value.real, 8))
print("expected diagonal:", 24 / np.pi**4)

# Away from s = 0 the kernel is a genuinely complex matrix, still
# homogeneous of degree -10 under the parabolic scaling.
s = [0.4, -0.2, 0.1]
v1 = st.szego_kernel(1, y, s).value
v2 = st.szego_kernel(1, [2.0, 0, 0, 0], [4 * c for c in s]).value
print("\nscaling check, max |2^10 S(2y,4s) - S(y,s)|:", np.abs(2**10 * v2 - v1).max())
print("S(y, s) =")
print(np.round(v1, 6))
