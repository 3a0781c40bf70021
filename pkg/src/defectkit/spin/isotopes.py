"""Nuclear spins and gyromagnetic ratios of common isotopes.

gamma/2pi in MHz/T from standard nuclear data tables.
"""

import math

# isotope: (gamma / 2pi in MHz/T, nuclear spin I)
_TABLE = {
    "1H": (42.577478, 0.5),
    "10B": (4.575, 3.0),
    "11B": (13.6630, 1.5),
    "13C": (10.7084, 0.5),
    "14N": (3.0777, 1.0),
    "15N": (-4.3173, 0.5),
    "17O": (-5.7742, 2.5),
    "29Si": (-8.4655, 0.5),
}


def isotope_data(symbol: str) -> tuple:
    """Return (gamma in rad s^-1 T^-1, I) for an isotope like ``"14N"``."""
    try:
        gamma_mhz, spin = _TABLE[symbol]
    except KeyError:
        raise KeyError(f"no bundled nuclear data for isotope {symbol!r}") from None
    return 2.0 * math.pi * gamma_mhz * 1e6, spin


def known_isotopes() -> list:
    return sorted(_TABLE)
