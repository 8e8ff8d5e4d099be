# The directed-divergence asymmetry D(P||P+hv) - D(P+hv||P).
#
# Quadratic terms cancel, so the leading antisymmetric term is cubic in h
# (fitted slope 3).  Normalizing the fitted coefficient by the forward cubic
# contraction T_vvv gives -1/6 for every Bregman-type divergence in natural
# coordinates: the reverse expansion D(P+hv||P) carries coefficient +1/3
# because its base point moves too, and 1/6 - 1/3 = -1/6.  A bare sign flip
# of the displacement would instead suggest +1/3; the probe reports both so
# the discrepancy stays visible.
import numpy as np

from infogeo import (
    Bernoulli,
    ExponentialScale,
    GaussianFixedSigma,
    asymmetry_probe,
    natural_view,
)

steps = [0.1, 0.05, 0.025, 0.0125]

probe = asymmetry_probe(ExponentialScale(), [1.0], [1.0], steps)
print("exponential at rate 1, direction +1:")
for h, v in zip(probe.steps, probe.values):
    print(f"  h={h:<7g} asymmetry {v:+.3e}")
print(f"  fitted slope        {probe.slope:.3f}   (cubic scaling => 3)")
print(f"  fitted coefficient  {probe.coefficient:+.5f}")
print(f"  forward cubic T_vvv {probe.cubic_vvv:+.5f}")
print(f"  ratio               {probe.ratio:+.5f}  (Bregman value -1/6 = {-1/6:+.5f})")
print(f"  naive sign-flip convention would give +1/3 = {1/3:+.5f}")

print()
print("ratio across base points and directions (bernoulli, natural chart):")
view = natural_view(Bernoulli())
for eta, v in [([-1.1], [1.0]), ([0.7], [1.0]), ([-0.4], [-1.0])]:
    p = asymmetry_probe(view, eta, v, [0.2, 0.1, 0.05, 0.025])
    print(f"  eta={eta[0]:+.2f} v={v[0]:+.0f}: slope {p.slope:.3f}  ratio {p.ratio:+.5f}")

print()
sym = asymmetry_probe(GaussianFixedSigma(1.0), [0.0], [1.0], steps)
print(f"gaussian (fixed scale) probe degenerate: {sym.degenerate} "
      "(identically symmetric divergence, no odd part)")
