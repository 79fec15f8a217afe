"""SDN-based L3 mobility simulator."""

from ._sdnmob import (
    ComparisonError,
    ConfigError,
    Error,
    MetricsTrace,
    ParseError,
    RunConfig,
    ScenarioError,
    compare,
    execute,
    load_config,
    nat_round_trip,
    parse_config,
    parse_host_report,
    run,
    serialize_host_report,
)

__all__ = [
    "ComparisonError",
    "ConfigError",
    "Error",
    "MetricsTrace",
    "ParseError",
    "RunConfig",
    "ScenarioError",
    "compare",
    "execute",
    "load_config",
    "nat_round_trip",
    "parse_config",
    "parse_host_report",
    "run",
    "serialize_host_report",
]
