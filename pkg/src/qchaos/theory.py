"""Closed-form border and time-scale predictors.

Every predictor returns a :class:`Prediction`; those whose prefactor is only
known to order of magnitude carry ``order_of_magnitude=True`` and use a unit
constant, so only their scaling should be compared against simulations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvalidParameterError
from .models import count_directly_coupled

C_TBRIM = 0.58
C_QUBIT = 3.16
C_ENTROPY = 0.41
#: fitted U_c * rho_c of the three-particle layer model
UC_RHO_C_LAYER = 0.62


@dataclass(frozen=True)
class Prediction:
    value: float
    formula: str
    inputs: dict = field(default_factory=dict)
    order_of_magnitude: bool = False
    warning: str | None = None

    def __float__(self):
        return float(self.value)


def _positive(**kw):
    for k, v in kw.items():
        if not v > 0:
            raise InvalidParameterError(f"{k} must be positive, got {v}")


def two_body_interval(m: int, Delta: float = 1.0) -> float:
    """Energy range ``(2m - 4) Delta`` reached by one two-body transition."""
    return (2 * m - 4) * Delta


def rho_c_tbrim(m: int, n: int, Delta: float = 1.0) -> float:
    """Density of directly coupled states ``K / B``."""
    return count_directly_coupled(m, n) / two_body_interval(m, Delta)


def rho_c_sgqc(n_coupled: int, delta: float) -> float:
    """Density of directly coupled register states: ``n_coupled`` states
    spread over the window ``2 delta`` of one-qubit splittings."""
    _positive(delta=delta)
    return n_coupled / (2 * delta)


def rho_2(m: int, Delta: float = 1.0) -> float:
    """Two-particle density ``m / (4 Delta)``, valid for ``m >> n >> 1``."""
    return m / (4 * Delta)


def predict_uc_tbrim(m: int, n: int, Delta: float = 1.0, C: float = C_TBRIM) -> Prediction:
    K = count_directly_coupled(m, n)
    B = two_body_interval(m, Delta)
    return Prediction(C * B / K, "uc_tbrim", dict(m=m, n=n, Delta=Delta, C=C))


def predict_jc_sgqc(delta: float, n: int, Cq: float = C_QUBIT) -> Prediction:
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    _positive(delta=delta)
    return Prediction(Cq * delta / n, "jc_sgqc", dict(delta=delta, n=n, Cq=Cq))


def predict_jcs_sgqc(delta: float, n: int, C: float = C_ENTROPY) -> Prediction:
    return Prediction(predict_jc_sgqc(delta, n, C).value, "jcs_sgqc", dict(delta=delta, n=n, C=C))


def predict_gamma(coupling: float, scale: float, n: int | None = None,
                  regime: str = "tbrim_golden_rule") -> Prediction:
    """Spreading width.

    ``sgqc_weak``: ``J**2 n / delta`` (``scale`` = delta), meant for ``J < delta``.
    ``sgqc_strong``: ``J sqrt(n)``, meant for ``J > delta``.
    ``tbrim_golden_rule``: ``2 pi U**2 rho_c / 3`` (``scale`` = rho_c).
    """
    inputs = dict(coupling=coupling, scale=scale, n=n, regime=regime)
    if regime == "tbrim_golden_rule":
        return Prediction(2 * math.pi * coupling**2 * scale / 3, "gamma_golden_rule", inputs)
    if regime not in ("sgqc_weak", "sgqc_strong"):
        raise InvalidParameterError(f"unknown regime {regime!r}")
    if n is None or n < 1:
        raise InvalidParameterError("qubit regimes need n >= 1")
    if regime == "sgqc_weak":
        _positive(delta=scale)
        warn = "J > delta: weak-coupling law outside its range" if coupling > scale else None
        return Prediction(coupling**2 * n / scale, "gamma_sgqc_weak", inputs, True, warn)
    warn = "J < delta: strong-coupling law outside its range" if coupling < scale else None
    return Prediction(coupling * math.sqrt(n), "gamma_sgqc_strong", inputs, True, warn)


def predict_xi(U: float, rho_c: float, rho_n: float) -> Prediction:
    """Participation number ``2 U**2 rho_c rho_n`` of chaotic eigenstates."""
    warn = "U = 0: perturbative regime, law not applicable" if U == 0 else None
    return Prediction(2 * U**2 * rho_c * rho_n, "xi", dict(U=U, rho_c=rho_c, rho_n=rho_n), warning=warn)


def thermalization_border(Delta: float, U: float) -> tuple[Prediction, Prediction]:
    """Excitation energy and temperature above which interaction thermalizes
    a Fermi gas (unit prefactor)."""
    _positive(Delta=Delta, U=U)
    r = Delta / U
    inputs = dict(Delta=Delta, U=U)
    return (Prediction(Delta * r ** (2 / 3), "deltaE_ch", inputs, True),
            Prediction(Delta * r ** (1 / 3), "T_ch", inputs, True))


def decoherence_scales(Gamma_T: float, omega: float) -> tuple[Prediction, Prediction]:
    """Relaxation time ``1/Gamma_T`` and phase-coherence time
    ``(omega**2 Gamma_T)**(-1/3)`` for noise-driven decoherence."""
    _positive(Gamma_T=Gamma_T, omega=omega)
    inputs = dict(Gamma_T=Gamma_T, omega=omega)
    return (Prediction(1 / Gamma_T, "tau_chi_noise", inputs, True),
            Prediction((omega**2 * Gamma_T) ** (-1 / 3), "tau_phi_noise", inputs, True))


def multiqubit_spacing(n: int, delta0: float = 1.0) -> Prediction:
    """Mean spacing ``n delta0 / 2**n`` between register eigenstates."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    return Prediction(n * delta0 / 2**n, "multiqubit_spacing", dict(n=n, delta0=delta0))


def border_to_spacing_ratio(n: int, delta: float, delta0: float = 1.0, Cq: float = C_QUBIT) -> float:
    return predict_jc_sgqc(delta, n, Cq).value / multiqubit_spacing(n, delta0).value


PREDICTORS = {
    "uc_tbrim": predict_uc_tbrim,
    "jc_sgqc": predict_jc_sgqc,
    "jcs_sgqc": predict_jcs_sgqc,
    "gamma": predict_gamma,
    "xi": predict_xi,
    "thermalization": thermalization_border,
    "decoherence": decoherence_scales,
    "multiqubit_spacing": multiqubit_spacing,
}
