"""First and second variations against finite-difference oracles.

The analytic variations are exact derivatives of the discretized
energies (tensor formulas for the first, a forward-mode second-order
jet for the second), so the only error in this comparison is the
truncation and roundoff of the finite differences themselves.
"""

import numpy as np

from viscmin import (energy, first_variation, make_preset,
                     random_variation, second_variation_ambient,
                     second_variation_constrained)


def main():
    im = make_preset("perturbed_clifford", resolution=16, seed=3)
    w = random_variation(im, seed=7, amplitude=0.05, band=2, tangent=True)

    fv = first_variation(im, w)
    sv = second_variation_ambient(im, w)
    print("free ambient path  Phi + t w   (perturbed clifford)")
    for key, an, fd in [
        ("dArea ", fv["d_area"], energy.fd_first(
            lambda t: energy.free_path_energies(im, w, t)[0])),
        ("dF    ", fv["d_f"], energy.fd_first(
            lambda t: energy.free_path_energies(im, w, t)[1])),
        ("d2Area", sv["d2_area"], energy.fd_second(
            lambda t: energy.free_path_energies(im, w, t)[0], h=1e-2)),
        ("d2F   ", sv["d2_f"], energy.fd_second(
            lambda t: energy.free_path_energies(im, w, t)[1], h=1e-2)),
    ]:
        print(f"  {key}  analytic {an:+.10e}   fd {fd:+.10e}   "
              f"diff {abs(an - fd):.1e}")

    # the constrained path retracts radially back onto S^3; its second
    # variation picks up the first variation of the retraction
    # curvature -|w|^2 Phi on top of the ambient hessian
    sigma = 0.2
    an = second_variation_constrained(im, w, sigma=sigma)

    def a_sigma_path(t):
        area, f = energy.projected_path_energies(im, w, t)
        return area + sigma**2 * f

    fd = energy.fd_second(a_sigma_path, h=1e-2)
    print()
    print(f"constrained path  pi(Phi + t w),  sigma = {sigma}")
    print(f"  d2A_sigma  analytic {an:+.10e}   fd {fd:+.10e}   "
          f"diff {abs(an - fd):.1e}")

    # at a genuine critical point the first variation vanishes
    print()
    clifford = make_preset("clifford_torus", resolution=16)
    wc = random_variation(clifford, seed=1, amplitude=0.05, band=2,
                          tangent=True)
    fv = first_variation(clifford, wc)
    print("at the clifford torus (minimal in S^3):")
    print(f"  dArea = {fv['d_area']:+.2e}  along a random tangent "
          "variation")


if __name__ == "__main__":
    main()
