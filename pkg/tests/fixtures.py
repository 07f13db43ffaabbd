"""Shared fixtures: the worked-example component/configuration/trace and a
small problem-solving datatype model used across the test suite."""
from __future__ import annotations

from archcheck.algebra import (
    Algebra,
    BaseSort,
    PairSort,
    SetSort,
    Signature,
)
from archcheck.interfaces import (
    Interface,
    InterfaceSpec,
    PortSpec,
    SpecInterpretation,
    identity_interpretation,
)
from archcheck.model import (
    ArchConfiguration,
    ComponentUniverse,
    ConfigurationTrace,
    make_snapshot,
)

PROB = BaseSort("PROB")
SOL = BaseSort("SOL")


# ---------------------------------------------------------------------------
# Worked example: one component, one configuration, one three-step trace.
# Where the published figure has inconsistent connected valuations, the
# fixture keeps the receiving side equal to the union of connected outputs.


def c1_k0():
    return make_snapshot(
        "c1",
        local={"l0": {"A"}},
        inputs={"i0": {"5"}},
        outputs={"o0": {"9"}, "o1": {"A"}, "o2": {"5"}},
    )


def c2_k0():
    return make_snapshot(
        "c2",
        local={"l0": {"4"}, "l1": {"C"}},
        inputs={"i0": {"Z"}, "i1": {"A"}, "i2": {"8"}},
        outputs={"o0": {"9"}},
    )


def c3_k0():
    return make_snapshot(
        "c3",
        local={"l0": {"F"}},
        inputs={"i0": {"X"}, "i1": {"5"}},
        outputs={"o0": {"9"}, "o1": {"8"}},
    )


def config_k0() -> ArchConfiguration:
    return ArchConfiguration(
        active=frozenset({c1_k0(), c2_k0(), c3_k0()}),
        connection={
            ("c2", "i1"): {("c1", "o1")},
            ("c3", "i1"): {("c1", "o2")},
            ("c2", "i2"): {("c3", "o1")},
        },
    )


def c1_k1():
    return make_snapshot(
        "c1",
        local={"l0": {"A"}},
        inputs={"i0": {"8"}},
        outputs={"o0": {"1"}, "o1": {"G"}, "o2": {"7"}},
    )


def c2_k1():
    return make_snapshot(
        "c2",
        local={"l0": {"4"}, "l1": {"C"}},
        inputs={"i0": {"G"}, "i1": {"G"}, "i2": {"8"}},
        outputs={"o0": {"1"}},
    )


def config_k1() -> ArchConfiguration:
    return ArchConfiguration(
        active=frozenset({c1_k1(), c2_k1()}),
        connection={("c2", "i1"): {("c1", "o1")}},
    )


def c1_k2():
    return make_snapshot(
        "c1",
        local={"l0": {"A"}},
        inputs={"i0": {"6"}},
        outputs={"o0": {"5"}, "o1": {"K"}, "o2": {"9"}},
    )


def c2_k2():
    return make_snapshot(
        "c2",
        local={"l0": {"4"}, "l1": {"C"}},
        inputs={"i0": {"B"}, "i1": {"W"}, "i2": {"6"}},
        outputs={"o0": {"2"}},
    )


def c4_k2():
    return make_snapshot(
        "c4",
        local={"l0": {"4"}},
        inputs={"i0": {"T"}, "i1": {"5"}},
        outputs={"o0": {"4"}, "o1": {"B"}},
    )


def config_k2() -> ArchConfiguration:
    return ArchConfiguration(
        active=frozenset({c1_k2(), c2_k2(), c4_k2()}),
        connection={
            ("c4", "i1"): {("c1", "o0")},
            ("c2", "i0"): {("c4", "o1")},
        },
    )


def example_universe() -> ComponentUniverse:
    return ComponentUniverse(
        frozenset(
            {
                c1_k0(),
                c2_k0(),
                c3_k0(),
                c1_k1(),
                c2_k1(),
                c1_k2(),
                c2_k2(),
                c4_k2(),
            }
        )
    )


def example_trace() -> ConfigurationTrace:
    return ConfigurationTrace(
        universe=example_universe(),
        steps=(config_k0(), config_k1(), config_k2()),
    )


# ---------------------------------------------------------------------------
# Problem/solution datatype model: three problems where solving pA needs
# pB and pC first; used by algebra, interface, and constraint tests.


def probsol_signature() -> Signature:
    return Signature(
        sorts={"PROB", "SOL"},
        functions={"solve": ((PROB,), SOL)},
        predicates={"prec": (PROB, PROB)},
    )


def probsol_algebra() -> Algebra:
    return Algebra(
        signature=probsol_signature(),
        carriers={"PROB": ("pA", "pB", "pC"), "SOL": ("sA", "sB", "sC")},
        functions={
            "solve": {("pA",): "sA", ("pB",): "sB", ("pC",): "sC"},
        },
        predicates={"prec": {("pB", "pA"), ("pC", "pA")}},
    )


BB_PORT_SORTS = {
    "bbip": PairSort(PROB, SetSort(PROB)),
    "bbis": PairSort(PROB, SOL),
    "bbop": PROB,
    "bbos": PairSort(PROB, SOL),
    "ksip": PROB,
    "ksis": PairSort(PROB, SOL),
    "ksop": PairSort(PROB, SetSort(PROB)),
    "ksos": PairSort(PROB, SOL),
    "prob": PROB,
}


def blackboard_port_spec() -> PortSpec:
    return PortSpec(BB_PORT_SORTS)


def blackboard_interfaces(assertions=None) -> InterfaceSpec:
    return InterfaceSpec(
        interfaces={
            "BB": Interface(
                inputs={"bbip", "bbis"}, outputs={"bbop", "bbos"}
            ),
            "KS": Interface(
                local={"prob"},
                inputs={"ksip", "ksis"},
                outputs={"ksop", "ksos"},
            ),
        },
        assertions=assertions or {},
    )


def ks_snapshot(cid, prob, ksip=(), ksis=(), ksop=(), ksos=()):
    return make_snapshot(
        cid,
        local={"prob": prob},
        inputs={"ksip": ksip, "ksis": ksis},
        outputs={"ksop": ksop, "ksos": ksos},
    )


def bb_snapshot(cid="bb", bbip=(), bbis=(), bbop=(), bbos=()):
    return make_snapshot(
        cid,
        inputs={"bbip": bbip, "bbis": bbis},
        outputs={"bbop": bbop, "bbos": bbos},
    )


def blackboard_interpretation(snapshots_by_interface) -> SpecInterpretation:
    return SpecInterpretation(
        {
            interface: frozenset(
                identity_interpretation(s) for s in snapshots
            )
            for interface, snapshots in snapshots_by_interface.items()
        }
    )
