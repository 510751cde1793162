"""Coverage and throughput of uplink NOMA for coexisting ground and aerial IoT devices.

Analytic estimators (stochastic-geometry Laplace transforms, Gauss-Chebyshev
and series forms) sit next to a Monte Carlo engine that serves as ground truth.
"""

from .config import NetworkConfig, load_config
from .errors import ConfigError, ConvergenceError, DomainError, NomaError, PreconditionError
from .report import CoverageReport, SimEstimate, ThroughputReport

__all__ = [
    "NetworkConfig", "load_config", "CoverageReport", "SimEstimate", "ThroughputReport",
    "NomaError", "DomainError", "ConfigError", "PreconditionError", "ConvergenceError",
]
__version__ = "0.1.0"
