"""Free-space optical channel impairments and received power.

The main channel gain is the product of three factors::

    h_main = h_att * h_pointing * h_path

All factors are returned as linear losses in (0, 1]. ``received_power_db``
works in the dB domain so that very long or very foggy links never underflow.

Units: distances in metres (attenuation coefficients in dB/km), angles in
radians, powers and gains in dB on one shared, unnamed reference scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, SingularityError

KIM_REFERENCE_WAVELENGTH_NM = 550.0
KIM_VISIBILITY_CONSTANT = 3.91
NEPER_TO_DB = 10.0 / math.log(10.0)  # 4.3429...; Kim's "4.343"
KIM_DB_FACTOR = 4.343

DEFAULT_BEAM_DIVERGENCE_RAD = 20e-6


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    if value <= 0.0:
        raise DomainError(f"cannot express non-positive ratio {value!r} in dB")
    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class AtmosphereSpec:
    """Attenuation coefficient of the medium, in dB/km.

    ``provenance`` is ``"derived"`` when the coefficient came from Kim's
    visibility model (see :meth:`from_visibility`) and ``"asserted"`` otherwise.
    """

    alpha_db_per_km: float = 0.0
    visibility_km: float | None = None
    provenance: str = "asserted"

    def __post_init__(self) -> None:
        alpha = _finite("alpha_db_per_km", self.alpha_db_per_km)
        if alpha < 0.0:
            raise DomainError(f"alpha_db_per_km must be >= 0, got {alpha!r}")
        if self.visibility_km is not None:
            vis = _finite("visibility_km", self.visibility_km)
            if vis <= 0.0:
                raise DomainError(f"visibility_km must be > 0, got {vis!r}")
        if self.provenance not in ("asserted", "derived"):
            raise DomainError(f"unknown provenance {self.provenance!r}")

    @classmethod
    def from_visibility(cls, visibility_km: float, wavelength_m: float) -> AtmosphereSpec:
        alpha = kim_attenuation_db_per_km(visibility_km, wavelength_m)
        return cls(alpha_db_per_km=alpha, visibility_km=visibility_km, provenance="derived")

    def check_wavelength(self, wavelength_m: float) -> None:
        """Raise if a visibility is attached but disagrees with ``alpha_db_per_km``."""
        if self.visibility_km is None:
            return
        expected = kim_attenuation_db_per_km(self.visibility_km, wavelength_m)
        if not math.isclose(self.alpha_db_per_km, expected, rel_tol=1e-12, abs_tol=1e-15):
            raise DomainError(
                f"alpha_db_per_km={self.alpha_db_per_km!r} does not match the Kim-model value "
                f"{expected!r} for visibility {self.visibility_km} km at {wavelength_m} m"
            )


@dataclass(frozen=True)
class LinkGeometry:
    """Separation and alignment of one transmitter/receiver pair.

    ``attenuating_path_m`` is the length of the path that lies inside the
    attenuating medium; ``None`` means the whole path. ``pointing_penalty_db``
    replaces the Gaussian misalignment model with a fixed loss when set.
    """

    distance_m: float
    pointing_error_rad: float = 0.0
    beam_divergence_rad: float = DEFAULT_BEAM_DIVERGENCE_RAD
    attenuating_path_m: float | None = None
    pointing_penalty_db: float | None = None

    def __post_init__(self) -> None:
        d = _finite("distance_m", self.distance_m)
        if d <= 0.0:
            raise SingularityError(f"distance_m must be > 0, got {d!r}")
        theta = _finite("pointing_error_rad", self.pointing_error_rad)
        if not 0.0 <= theta < math.pi / 2:
            raise DomainError(f"pointing_error_rad must lie in [0, pi/2), got {theta!r}")
        div = _finite("beam_divergence_rad", self.beam_divergence_rad)
        if div <= 0.0:
            raise DomainError(f"beam_divergence_rad must be > 0, got {div!r}")
        if self.attenuating_path_m is not None:
            if _finite("attenuating_path_m", self.attenuating_path_m) < 0.0:
                raise DomainError("attenuating_path_m must be >= 0")
        if self.pointing_penalty_db is not None:
            if _finite("pointing_penalty_db", self.pointing_penalty_db) < 0.0:
                raise DomainError("pointing_penalty_db must be >= 0")

    @property
    def attenuated_length_m(self) -> float:
        if self.attenuating_path_m is None:
            return self.distance_m
        return min(self.attenuating_path_m, self.distance_m)


@dataclass(frozen=True)
class LinkBudget:
    tx_power_db: float
    tx_gain_db: float
    rx_gain_db: float
    wavelength_m: float
    noise_db: float

    def __post_init__(self) -> None:
        for name in ("tx_power_db", "tx_gain_db", "rx_gain_db", "noise_db"):
            _finite(name, getattr(self, name))
        if _finite("wavelength_m", self.wavelength_m) <= 0.0:
            raise DomainError(f"wavelength_m must be > 0, got {self.wavelength_m!r}")

    @property
    def eirp_db(self) -> float:
        return self.tx_power_db + self.tx_gain_db + self.rx_gain_db


@dataclass(frozen=True)
class LossBreakdown:
    """Positive dB losses of each impairment; disabled ones are 0."""

    attenuation_db: float = 0.0
    pointing_db: float = 0.0
    path_loss_db: float = 0.0

    @property
    def total_db(self) -> float:
        return self.attenuation_db + self.pointing_db + self.path_loss_db


@dataclass(frozen=True)
class ChannelResult:
    rx_power_db: float
    snr_db: float
    breakdown: LossBreakdown

    @property
    def snr_linear(self) -> float:
        return _ratio_from_db(self.snr_db)


def atmospheric_attenuation(atmosphere: AtmosphereSpec, distance_m: float) -> float:
    """Linear attenuation ``10**(-alpha * d_km / 10)`` over ``distance_m``."""
    distance_m = _finite("distance_m", distance_m)
    if distance_m < 0.0:
        raise DomainError(f"distance_m must be >= 0, got {distance_m!r}")
    return 10.0 ** (-attenuation_loss_db(atmosphere.alpha_db_per_km, distance_m) / 10.0)


def attenuation_loss_db(alpha_db_per_km: float, distance_m: float) -> float:
    if alpha_db_per_km < 0.0 or distance_m < 0.0:
        raise DomainError("attenuation coefficient and distance must be >= 0")
    return alpha_db_per_km * distance_m / 1000.0


def kim_size_exponent(visibility_km: float) -> float:
    """Kim's particle size distribution exponent q(V)."""
    v = visibility_km
    if v > 50.0:
        return 1.6
    if v > 6.0:
        return 1.3
    if v > 1.0:
        return 0.16 * v + 0.34
    if v > 0.5:
        return v - 0.5
    return 0.0


def kim_attenuation_db_per_km(visibility_km: float, wavelength_m: float) -> float:
    """Attenuation coefficient in dB/km from visibility via Kim's model.

    >>> round(kim_attenuation_db_per_km(50.0, 550e-9), 4)
    0.3396
    """
    v = _finite("visibility_km", visibility_km)
    lam = _finite("wavelength_m", wavelength_m)
    if v <= 0.0 or lam <= 0.0:
        raise DomainError("visibility_km and wavelength_m must be > 0")
    ratio = (lam * 1e9) / KIM_REFERENCE_WAVELENGTH_NM
    return KIM_DB_FACTOR * (KIM_VISIBILITY_CONSTANT / v) * ratio ** (-kim_size_exponent(v))


def pointing_loss_db(pointing_error_rad: float, beam_divergence_rad: float) -> float:
    if beam_divergence_rad <= 0.0:
        raise DomainError(f"beam_divergence_rad must be > 0, got {beam_divergence_rad!r}")
    if not 0.0 <= pointing_error_rad < math.pi / 2:
        raise DomainError(f"pointing_error_rad must lie in [0, pi/2), got {pointing_error_rad!r}")
    return NEPER_TO_DB * 2.0 * (pointing_error_rad / beam_divergence_rad) ** 2


def pointing_loss(pointing_error_rad: float, beam_divergence_rad: float) -> float:
    """Gaussian-beam misalignment factor ``exp(-2 theta^2 / theta_div^2)``."""
    if beam_divergence_rad <= 0.0:
        raise DomainError(f"beam_divergence_rad must be > 0, got {beam_divergence_rad!r}")
    if not 0.0 <= pointing_error_rad < math.pi / 2:
        raise DomainError(f"pointing_error_rad must lie in [0, pi/2), got {pointing_error_rad!r}")
    return math.exp(-2.0 * (pointing_error_rad / beam_divergence_rad) ** 2)


def free_space_loss_db(distance_m: float, wavelength_m: float) -> float:
    if distance_m <= 0.0:
        raise SingularityError(f"free-space loss is singular at distance {distance_m!r}")
    if wavelength_m <= 0.0:
        raise DomainError(f"wavelength_m must be > 0, got {wavelength_m!r}")
    return 20.0 * math.log10(4.0 * math.pi * distance_m / wavelength_m)


def free_space_loss(distance_m: float, wavelength_m: float) -> float:
    """Inverse-square spreading factor ``(lambda / (4 pi d))**2``.

    Greater than one only when ``d < lambda / (4 pi)``, i.e. in the near field
    where the far-field formula is meaningless anyway.
    """
    if distance_m <= 0.0:
        raise SingularityError(f"free-space loss is singular at distance {distance_m!r}")
    if wavelength_m <= 0.0:
        raise DomainError(f"wavelength_m must be > 0, got {wavelength_m!r}")
    return (wavelength_m / (4.0 * math.pi * distance_m)) ** 2


def snr_linear(rx_power_db: float, noise_db: float) -> float:
    """``10**((P_r - N) / 10)``; ``inf`` when the ratio overflows a float."""
    rx_power_db = _finite("rx_power_db", rx_power_db)
    noise_db = _finite("noise_db", noise_db)
    return _ratio_from_db(rx_power_db - noise_db)


def _ratio_from_db(value_db: float) -> float:
    try:
        return 10.0 ** (value_db / 10.0)
    except OverflowError:
        return math.inf


def received_power_db(
    budget: LinkBudget,
    geometry: LinkGeometry,
    atmosphere: AtmosphereSpec,
    include_atmosphere: bool = True,
    include_pointing: bool = True,
) -> ChannelResult:
    """Received power and SNR after the enabled impairments.

    ``P_r = P_t + G_t + G_r - L_att - L_point - L_fsl`` with every term in dB.
    """
    atmosphere.check_wavelength(budget.wavelength_m)
    att = 0.0
    if include_atmosphere:
        att = attenuation_loss_db(atmosphere.alpha_db_per_km, geometry.attenuated_length_m)
    point = 0.0
    if include_pointing:
        if geometry.pointing_penalty_db is not None:
            point = geometry.pointing_penalty_db
        else:
            point = pointing_loss_db(geometry.pointing_error_rad, geometry.beam_divergence_rad)
    fsl = free_space_loss_db(geometry.distance_m, budget.wavelength_m)
    breakdown = LossBreakdown(attenuation_db=att, pointing_db=point, path_loss_db=fsl)
    rx = budget.eirp_db - breakdown.total_db
    return ChannelResult(rx_power_db=rx, snr_db=rx - budget.noise_db, breakdown=breakdown)
