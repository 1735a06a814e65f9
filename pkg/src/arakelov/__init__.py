"""Arakelov invariants of hyperelliptic curves and principally polarised abelian varieties."""
from .hyperelliptic import HyperellipticCurve, CurvePoint, period_matrix, xn_plus_one
from .theta import PeriodMatrix, ThetaCharacteristic

__all__ = ["HyperellipticCurve", "CurvePoint", "period_matrix", "xn_plus_one",
           "PeriodMatrix", "ThetaCharacteristic"]
