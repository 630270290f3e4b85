"""
Grid densities and entropy inequality checks
============================================

Everything here runs on dense trapezoid grids: entropies, convolutions
with Gaussian noise, and three inequality checks whose margins should be
positive for non-Gaussian inputs and zero at their Gaussian equality
cases.
"""

import math

from eeikit import (
    GridDensity,
    check_eei,
    check_epi,
    check_worst_noise,
    convolve_density,
    entropy_quadrature,
)

# ---------------------------------------------------------------------------
# Quadrature sanity: closed forms we can compare against.
# ---------------------------------------------------------------------------
std_normal = GridDensity.gaussian(1.0)
est = entropy_quadrature(std_normal)
print(f"h(N(0,1))    = {est.value:.12f}  closed form {0.5 * math.log(2 * math.pi * math.e):.12f}")

unif = GridDensity.uniform(0.0, 1.0)
print(f"h(U[0,1])    = {entropy_quadrature(unif).value:.12f}  closed form 0")

mix = GridDensity.mixture(0.5, -2.0, 1.0, 2.0, 1.0)
print(f"h(bimodal)   = {entropy_quadrature(mix).value:.12f}  (no closed form; error "
      f"estimate {entropy_quadrature(mix).error:.1e})")

blurred = convolve_density(unif, 0.25)
print(f"h(U + N(0,0.25)) = {entropy_quadrature(blurred).value:.12f}, "
      f"variance {blurred.variance():.6f} (exact {1.0 / 12.0 + 0.25:.6f})")

# ---------------------------------------------------------------------------
# Entropy power inequality: equality for Gaussians, slack otherwise.
# ---------------------------------------------------------------------------
print("\nentropy power inequality margins (lhs - rhs):")
print(f"  gaussian + gaussian : {check_epi(GridDensity.gaussian(1.0), GridDensity.gaussian(3.0)).margin:+.2e}")
print(f"  uniform  + uniform  : {check_epi(unif, GridDensity.uniform(-1.0, 1.0)).margin:+.2e}")
print(f"  bimodal  + gaussian : {check_epi(mix, std_normal).margin:+.2e}")

# ---------------------------------------------------------------------------
# Worst additive noise: Gaussian noise minimizes the information gain.
# ---------------------------------------------------------------------------
print("\nworst-noise margins:")
print(f"  gaussian input (equality) : {check_worst_noise(std_normal, 0.5, 0.5).margin:+.2e}")
print(f"  uniform input             : {check_worst_noise(GridDensity.uniform(0.0, 2.0), 0.7, 0.4).margin:+.2e}")

# ---------------------------------------------------------------------------
# The inequality this package exists for: candidate vs constructed optimum.
# ---------------------------------------------------------------------------
print("\nentropy-difference margins (optimum - candidate):")
rep = check_eei(unif, 2.0, 1.0, 1.0)
print(f"  uniform, single noise     : {rep.margin:+.4f}")
rep = check_eei(mix, 2.0, 1.0, 10.0, s2_v=4.0)
print(f"  bimodal, two noises       : {rep.margin:+.4f}")
rep = check_eei(GridDensity.gaussian(2.0), 2.0, 1.0, 10.0, s2_v=4.0)
print(f"  the optimum itself        : {rep.margin:+.2e}  (equality case)")
