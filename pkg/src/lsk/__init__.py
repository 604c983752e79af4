"""Numerical Lie sphere geometry for Dupin hypersurfaces.

Legendre lifts, curvature spheres, Dupin and Lie-curvature checks, the
surface-of-revolution / tube / cylinder constructions, and reducibility
and isoparametric classification from sampled curvature sphere maps.
"""
__version__ = "0.1.0"
