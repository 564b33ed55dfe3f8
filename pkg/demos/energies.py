"""Energies of the standard fixtures against their closed forms.

Every fixture here has an exact area and an exact curvature energy, so
this is the first thing to run after touching the geometry pipeline:
the numbers should agree to near machine precision already at
resolution 16, because the integrands are band-limited.
"""

import numpy as np

from viscmin import evaluate_energies, make_preset

PI = np.pi

FIXTURES = [
    # name, area, F = integral (1 + |II|^2)^2
    ("equator_s2_in_s3", 4 * PI, 4 * PI),        # totally geodesic: II = 0
    ("clifford_torus", 2 * PI**2, 18 * PI**2),   # |II|^2 = 2 in S^3
    ("round_sphere_r3", 4 * PI, 36 * PI),        # |II|^2 = 2 at radius 1
    ("clifford_in_r4", 2 * PI**2, 50 * PI**2),   # |II|^2 = 4 in flat R^4
]


def main():
    print(f"{'fixture':22s} {'area':>12s} {'exact':>12s} "
          f"{'F':>12s} {'exact':>12s} {'rel err':>9s}")
    for name, area, f in FIXTURES:
        im = make_preset(name, resolution=16)
        rep = evaluate_energies(im)
        err = max(abs(rep.area - area) / area, abs(rep.f_energy - f) / f)
        print(f"{name:22s} {rep.area:12.6f} {area:12.6f} "
              f"{rep.f_energy:12.4f} {f:12.4f} {err:9.1e}")

    print()
    print("the relaxed family on the clifford torus:")
    im = make_preset("clifford_torus", resolution=16)
    for sigma in (0.5, 0.25, 0.125, 0.0):
        rep = evaluate_energies(im, sigma)
        print(f"  sigma {sigma:5.3f}  A_sigma = area + sigma^2 F "
              f"= {rep.a_sigma:10.4f}")
    print("  (A_0 is the bare area, 2 pi^2 =",
          f"{2 * PI**2:.4f})")


if __name__ == "__main__":
    main()
