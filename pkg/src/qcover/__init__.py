"""Exact computations for the covering quantum algebra of osp(1|2)."""

from .pi_ring import (
    PI,
    Q,
    ONE,
    ZERO,
    PiRational,
    PiScalar,
    format_scalar,
    parse_scalar,
    qbinom,
    qfact,
    qint,
    theta_coeff,
)

__version__ = "0.1.0"
