"""archcheck: a specification language and conformance checker for
constraints over dynamic software architectures.

The model: components are snapshots with set-valued port valuations, an
architecture configuration activates components and connects their ports,
and a finite configuration trace records a run.  Datatypes are finite
algebras, interfaces type components, and constraints are linear-temporal
assertions over configurations, checked in closed (complete-trace) or open
(prefix, three-valued) mode.
"""

from .algebra import Algebra, Signature, check_well_founded, eval_term, models_spec
from .constraints import (
    CLOSED,
    OPEN,
    Monitor,
    Truth,
    Verdict,
    check_trace_assertion,
    trace_holds,
)
from .interfaces import (
    Interface,
    InterfaceSpec,
    PortSpec,
    SpecInterpretation,
    check_spec_interpretation,
)
from .model import (
    ArchConfiguration,
    ComponentSnapshot,
    ComponentUniverse,
    ConfigurationTrace,
    check_configuration,
    check_healthy,
    check_trace,
    make_snapshot,
)

__version__ = "0.1.0"

__all__ = [
    "Algebra",
    "ArchConfiguration",
    "CLOSED",
    "ComponentSnapshot",
    "ComponentUniverse",
    "ConfigurationTrace",
    "Interface",
    "InterfaceSpec",
    "Monitor",
    "OPEN",
    "PortSpec",
    "Signature",
    "SpecInterpretation",
    "Truth",
    "Verdict",
    "check_configuration",
    "check_healthy",
    "check_spec_interpretation",
    "check_trace",
    "check_trace_assertion",
    "check_well_founded",
    "eval_term",
    "make_snapshot",
    "models_spec",
    "trace_holds",
    "__version__",
]
