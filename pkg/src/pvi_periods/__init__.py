"""Algebro-geometric solutions of rank-two triangular Schlesinger systems.

Periods of v^n du on hyperelliptic curves, the triangular Schlesinger and
Euler-Poisson-Darboux structures they satisfy, the Painleve VI solutions of
the genus-one family, and independent reference solutions (Picard/Okamoto,
theta-quotient, theta-characteristic tau) of PVI(1/8, -1/8, 1/8, 3/8).
"""

__version__ = "0.1.0"
