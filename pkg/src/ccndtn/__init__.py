"""CCN over DTN: named-data forwarding with a bundle-protocol fallback.

The public surface is re-exported here; the CLI lives in :mod:`ccndtn.cli`.
"""

from .ccn import CcnNode, ContentStore, Face, FaceKind, Fib
from .dtn import BundleNode, Deliver, Transmit
from .gateway import Gateway, GatewayConfig, Repository
from .metrics import Metrics, collect_metrics
from .names import ANY, Eid, InvalidName, Name, format_name, is_prefix_of, parse_eid, parse_name
from .scenario import Scenario, ScenarioError, load_scenario
from .sim import Simulation, run_scenario
from .simnet import ContactSchedule, Engine, Link, LinkKind

__version__ = "0.1.0"

__all__ = [
    "ANY", "BundleNode", "CcnNode", "ContactSchedule", "ContentStore", "Deliver", "Eid",
    "Engine", "Face", "FaceKind", "Fib", "Gateway", "GatewayConfig", "InvalidName", "Link",
    "LinkKind", "Metrics", "Name", "Repository", "Scenario", "ScenarioError", "Simulation",
    "Transmit", "collect_metrics", "format_name", "is_prefix_of", "load_scenario",
    "parse_eid", "parse_name", "run_scenario",
]
