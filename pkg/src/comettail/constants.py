"""Physical constants in the package's internal units (micrometers, radians,
seconds). All wavelengths are vacuum wavelengths in um unless a name says
otherwise."""

# speed of light, um/s
C_UM_PER_S = 2.99792458e14

TWO_PI = 6.283185307179586


def angular_frequency(wavelength_um):
    """Vacuum angular frequency (rad/s) for a wavelength in um."""
    return TWO_PI * C_UM_PER_S / wavelength_um


def wavelength_from_omega(omega_rad_s):
    """Vacuum wavelength (um) for an angular frequency in rad/s."""
    return TWO_PI * C_UM_PER_S / omega_rad_s
