"""Frozen reference values shared by the unit and acceptance suites.

The sinusoidal-medium coefficient table is an externally published
reference trusted to about four significant figures; entries near 1e-10
are numerical noise in the reference itself and are compared with an
absolute tolerance instead.
"""

# Sinusoidal medium: K between 5/8 and 5/2, rho = 1/K.
SINUSOIDAL_K_A = 5 / 8
SINUSOIDAL_K_B = 5 / 2

PUBLISHED_SINUSOIDAL = {
    "alpha1": 2.2656e-10,
    "alpha2": -1.3208e-2,
    "alpha3": -1.8927e-11,
    "alpha4": -1.8172e-4,
    "alpha5": 1.3398e-3,
    "alpha6": 6.0711e-6,
    "beta1": 2.9249e-4,
    "beta2": -1.1033e-2,
    "beta3": -5.6345e-7,
    "beta4": -2.3474e-5,
    "beta5": 1.1465e-3,
    "beta6": 6.9060e-6,
    "gamma1": 2.2656e-10,
    "gamma2": 1.2843e-2,
    "gamma3": -1.8927e-11,
    "gamma4": -1.3391e-3,
    "gamma5": -1.6986e-4,
}

# Entries whose published magnitude is noise-level; compared absolutely.
NOISE_LEVEL = ("alpha1", "alpha3", "gamma1", "gamma3")

PUBLISHED_RTOL = 1e-3
PUBLISHED_ATOL = 1e-9

# Piecewise media used repeatedly in tests: (K_A, K_B, rho_A, rho_B).
CONSTANT_K_HIGH_CONTRAST = (1.0, 1.0, 8 + 56**0.5, 8 - 56**0.5)
CONSTANT_IMPEDANCE = (5 / 8, 5 / 2, 8 / 5, 2 / 5)
