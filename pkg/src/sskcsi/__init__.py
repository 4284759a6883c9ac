"""Error-rate analysis of TOSD space shift keying with imperfect channel knowledge.

The analytic engine lives in :mod:`sskcsi.analytic`; Monte Carlo
simulation of TOSD-SSK and the Alamouti/M-PSK baseline in
:mod:`sskcsi.montecarlo`.
"""

from .config import SystemConfig
from .errors import AccuracyError, ConfigError, DomainError

__all__ = ["SystemConfig", "AccuracyError", "ConfigError", "DomainError"]
__version__ = "0.1.0"
