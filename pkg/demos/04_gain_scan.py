"""Delayed-feedback gain scan: watch a stable wave lose stability.

Feedback of the form K [x(t) - h x(t - delay)] vanishes identically on any
discrete wave with symmetry (h, theta), so the orbit itself is untouched —
only its stability changes with the gain.  For the planar oscillator with
delay pi, the neutral branch of the controlled linearization crosses the
unit circle at gain k = 1/pi = 0.3183..., which a coarse scan below should
bracket to one grid cell.

Requirement checked by the scan itself: the gain structure must commute
with the symmetry matrix h, otherwise the feedback would not vanish on the
wave and the whole construction would be invalid.
"""

import numpy as np

from ddewave import catalog, scan_gain

problem = catalog.make("stuart_landau")
gains = np.round(np.linspace(0.0, 0.6, 13), 10)

result = scan_gain(problem.base_rhs, problem.base_jacobian, problem.orbit,
                   gains, mu_min=0.5)

print(f"{'gain k':>8} {'verdict':>12} {'max nontrivial |mu|':>20} "
      f"{'|det Delta(1)|':>15}")
for p in result.points:
    print(f"{p.gain:>8.3f} {p.classification:>12} "
          f"{p.max_nontrivial_modulus:>20.6f} {p.trivial_residual:>15.2e}")

intervals = result.stable_intervals()
print("\nstable gain interval(s):",
      ", ".join(f"[{a:.3f}, {b:.3f}]" for a, b in intervals) or "none")
print(f"analytic destabilization boundary: 1/pi = {1.0 / np.pi:.6f}")
