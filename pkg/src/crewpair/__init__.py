"""Airline crew pairing optimization: legal pairing generation, an IP-based initial
solution heuristic and a column-generation engine alternating LP and IP phases."""

from .config import Config, load_config, parse_config
from .errors import (CrewPairError, InfeasibleError, InputDefect, LegalityError, NoProgress,
                     UncoveredFlight)
from .rules import Airport, CostModel, Flight, Pairing, RuleSet, Schedule

__all__ = [
    "Airport", "Config", "CostModel", "CrewPairError", "Flight", "InfeasibleError",
    "InputDefect", "LegalityError", "NoProgress", "Pairing", "RuleSet", "Schedule",
    "UncoveredFlight", "load_config", "parse_config",
]
__version__ = "0.1.0"
