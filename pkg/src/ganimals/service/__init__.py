from .config import ENV_PREFIX, ServiceConfig, load_config
from .events import (
    EVENT_KINDS,
    Event,
    EventLog,
    event_from_json,
    event_json,
    iter_kind,
    read_events,
)
from .simulate import (
    AgentProfile,
    build_report,
    make_agents,
    report_json,
    run_simulation,
    simulate_service,
)
from .state import (
    GanimalRecord,
    Service,
    StepClock,
    WallClock,
    genome_from_payload,
    genome_to_payload,
)
from .api import create_app

__all__ = [
    "ENV_PREFIX",
    "ServiceConfig",
    "load_config",
    "EVENT_KINDS",
    "Event",
    "EventLog",
    "event_from_json",
    "event_json",
    "iter_kind",
    "read_events",
    "AgentProfile",
    "build_report",
    "make_agents",
    "report_json",
    "run_simulation",
    "simulate_service",
    "GanimalRecord",
    "Service",
    "StepClock",
    "WallClock",
    "genome_from_payload",
    "genome_to_payload",
    "create_app",
]
