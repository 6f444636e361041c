"""FSO link budgets, wiretap secrecy capacity and threat traceability for
space/aerial heterogeneous networks."""

from .errors import ConfigError, DomainError, FsoSecError, RegistryError, SingularityError, SweepPointError
from .physics import (
    AtmosphereSpec,
    ChannelResult,
    LinkBudget,
    LinkGeometry,
    LossBreakdown,
    atmospheric_attenuation,
    free_space_loss,
    kim_attenuation_db_per_km,
    pointing_loss,
    received_power_db,
    snr_linear,
)
from .secrecy import (
    AERIAL,
    ORBITAL,
    EavesdropperSpec,
    SecrecyResult,
    channel_capacity,
    evaluate_link_pair,
    secrecy_capacity,
)
from .scenarios import NodeSpec, Scenario, scenario_hapgs_lap, scenario_leom_hapgs
from .sweeps import SweepRow, SweepSpec, assessment_report, run_sweep, zero_secrecy_region
from .registry import (
    ProtectionTechnique,
    ThreatTechnique,
    TraceRegistry,
    TtcLink,
    bundled_registry,
    coverage_report,
    dump_registry,
    load_registry,
    protections_for,
    threats_for_element,
    validate_traceability,
)

__version__ = "0.1.0"
