"""Step-two groups and the spectral normal form of their skew forms.

Builds the first Heisenberg group and the 7-dimensional quaternionic
Heisenberg group, pairs their structure matrices with a frequency tau,
and normalizes the resulting skew form by an orthogonal frame.
"""

import numpy as np

import steptwo as st

# The group law is (x,t).(y,s) = (x+y, t+s+2B(x,y)).  On the first
# Heisenberg group, B is the standard symplectic form.
h1 = st.heisenberg(1)
a = h1.point([1.0, 0.0], [0.0])
b = h1.point([0.0, 1.0], [0.0])
print("H1 product (1,0;0).(0,1;0) =", h1.multiply(a, b).y, h1.multiply(a, b).t)
print("inverse cancels:", h1.multiply(a, h1.inverse(a)).y)

# The quaternionic Heisenberg group has three structure matrices obeying
# the quaternion relations, so every unit frequency gives |B_tau|^2 = I.
quat = st.quaternionic_heisenberg()
print("\nquaternionic relations:")
print("  B1 B2 B3 = -I:", np.allclose(quat.B[0] @ quat.B[1] @ quat.B[2], -np.eye(4)))
tau = np.array([0.48, -0.6, 0.64])
M = quat.b_tau(tau)
print("  (B_tau)^2 = -|tau|^2 I:", np.allclose(M @ M, -(tau @ tau) * np.eye(4)))

# normalize() returns the eigenvalue magnitudes mu (here both equal |tau|)
# and the orthogonal frame O putting B_tau into 2x2 block form.
frame = st.normalize(quat, tau)
print("\nmu(tau) =", frame.mu, " (|tau| =", np.linalg.norm(tau), ")")
print("residual |O^T B O - J| =", np.abs(frame.O.T @ M @ frame.O - frame.normal_form()).max())

# Frames continue smoothly along frequency paths, even though the
# spectrum here is fully degenerate.
path = [np.array([np.cos(t), np.sin(t), 0.0]) for t in np.linspace(0, np.pi / 3, 30)]
fr = st.normalize(quat, path[0])
drift = 0.0
for tau_next in path[1:]:
    nxt = st.continue_frame(fr, quat, tau_next)
    drift = max(drift, np.abs(nxt.O - fr.O).max())
    fr = nxt
print("\nlargest frame step along a 30-step path:", round(drift, 4))

# A degeneracy scan reports the eigenvalue multiplicity pattern per
# sampled direction; for the quaternionic group it is always (2,).
rng = np.random.default_rng(0)
samples = rng.standard_normal((12, 3))
samples /= np.linalg.norm(samples, axis=1, keepdims=True)
report = st.degeneracy_scan(quat, samples)
print("multiplicity patterns over the sphere:", report.patterns)
