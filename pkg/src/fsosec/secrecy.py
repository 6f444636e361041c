"""Wiretap-channel arithmetic: Shannon capacities and secrecy capacity.

The eavesdropper shares the legitimate transmitter's power and antenna gain.
It never suffers pointing loss; whether it suffers atmospheric attenuation is
set by its :class:`ImpairmentProfile`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import DomainError
from .physics import (
    AtmosphereSpec,
    ChannelResult,
    LinkBudget,
    LinkGeometry,
    received_power_db,
)

MIN_EAVESDROPPER_DISTANCE_M = 1.0
DEFAULT_NOISE_DB = -130.0

_LOG2_10 = math.log2(10.0)


@dataclass(frozen=True)
class ImpairmentProfile:
    name: str
    atmosphere: bool


ORBITAL = ImpairmentProfile("orbital", atmosphere=False)
AERIAL = ImpairmentProfile("aerial", atmosphere=True)
PROFILES = {p.name: p for p in (ORBITAL, AERIAL)}


def profile_named(name: str) -> ImpairmentProfile:
    try:
        return PROFILES[name]
    except KeyError:
        raise DomainError(f"unknown impairment profile {name!r}; expected one of {sorted(PROFILES)}") from None


@dataclass(frozen=True)
class EavesdropperSpec:
    gain_db: float
    distance_m: float
    noise_db: float = DEFAULT_NOISE_DB
    profile: ImpairmentProfile = ORBITAL
    attenuating_path_m: float | None = None

    def __post_init__(self) -> None:
        for name in ("gain_db", "distance_m", "noise_db"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.distance_m < MIN_EAVESDROPPER_DISTANCE_M:
            raise DomainError(
                f"eavesdropper distance {self.distance_m!r} m is below the "
                f"{MIN_EAVESDROPPER_DISTANCE_M} m minimum"
            )
        if isinstance(self.profile, str):
            object.__setattr__(self, "profile", profile_named(self.profile))


@dataclass(frozen=True)
class SecrecyResult:
    snr_main: float
    snr_eve: float
    cap_main_bps_hz: float
    cap_eve_bps_hz: float
    secrecy_bps_hz: float
    main: ChannelResult | None = None
    eve: ChannelResult | None = None


def channel_capacity(snr_linear: float) -> float:
    """Shannon spectral efficiency ``log2(1 + snr)`` in bps/Hz."""
    if math.isnan(snr_linear) or snr_linear < 0.0:
        raise DomainError(f"snr must be >= 0, got {snr_linear!r}")
    return math.log1p(snr_linear) / math.log(2.0)


def capacity_from_snr_db(snr_db: float) -> float:
    """``log2(1 + 10**(snr_db/10))`` without overflow for very large SNR."""
    if not math.isfinite(snr_db):
        raise DomainError(f"snr_db must be finite, got {snr_db!r}")
    if snr_db > 0.0:
        return snr_db * _LOG2_10 / 10.0 + math.log1p(10.0 ** (-snr_db / 10.0)) / math.log(2.0)
    return math.log1p(10.0 ** (snr_db / 10.0)) / math.log(2.0)


def secrecy_capacity(cap_main: float, cap_eve: float) -> float:
    return max(cap_main - cap_eve, 0.0)


def eavesdropper_channel(
    budget: LinkBudget,
    atmosphere: AtmosphereSpec,
    eve: EavesdropperSpec,
) -> ChannelResult:
    eve_budget = replace(budget, rx_gain_db=eve.gain_db, noise_db=eve.noise_db)
    geometry = LinkGeometry(distance_m=eve.distance_m, attenuating_path_m=eve.attenuating_path_m)
    return received_power_db(
        eve_budget,
        geometry,
        atmosphere,
        include_atmosphere=eve.profile.atmosphere,
        include_pointing=False,
    )


def evaluate_link_pair(
    budget: LinkBudget,
    main_geometry: LinkGeometry,
    atmosphere: AtmosphereSpec,
    eve: EavesdropperSpec,
) -> SecrecyResult:
    """Secrecy of the main link against one passive eavesdropper."""
    main = received_power_db(budget, main_geometry, atmosphere)
    tapped = eavesdropper_channel(budget, atmosphere, eve)
    cap_main = capacity_from_snr_db(main.snr_db)
    cap_eve = capacity_from_snr_db(tapped.snr_db)
    return SecrecyResult(
        snr_main=main.snr_linear,
        snr_eve=tapped.snr_linear,
        cap_main_bps_hz=cap_main,
        cap_eve_bps_hz=cap_eve,
        secrecy_bps_hz=secrecy_capacity(cap_main, cap_eve),
        main=main,
        eve=tapped,
    )
