from .alpha import (
    ALPHA_THRESHOLD,
    AlphaData,
    all_distinct,
    alpha_certify,
    alpha_data,
    certify_alpha,
    distinct,
    isolation_radius,
    same_root,
    taylor_coefficients,
)
from .certificate import Certificate, Method
from .interval import ComplexInterval, Interval, eval_poly_interval, eval_system_interval
from .krawczyk import boxes_disjoint, certify_krawczyk, krawczyk_certify

RealInterval = Interval


def certify(F, points, method: str = "krawczyk") -> list[Certificate]:
    if Method(method) is Method.ALPHA:
        return certify_alpha(F, points)
    return certify_krawczyk(F, points)


__all__ = [
    "ALPHA_THRESHOLD",
    "AlphaData",
    "Certificate",
    "ComplexInterval",
    "Interval",
    "Method",
    "RealInterval",
    "all_distinct",
    "alpha_certify",
    "alpha_data",
    "boxes_disjoint",
    "certify",
    "certify_alpha",
    "certify_krawczyk",
    "distinct",
    "eval_poly_interval",
    "eval_system_interval",
    "isolation_radius",
    "krawczyk_certify",
    "same_root",
    "taylor_coefficients",
]
