from .quadrature import DEFAULT_QUADRATURE, QuadratureSpec, integrate_adaptive
from .special import (bessel_i_scaled, bessel_j, bessel_j0_zero, erfc, erfcx,
                      log_erfc)

__all__ = [
    "DEFAULT_QUADRATURE", "QuadratureSpec", "integrate_adaptive",
    "bessel_i_scaled", "bessel_j", "bessel_j0_zero", "erfc", "erfcx", "log_erfc",
]
