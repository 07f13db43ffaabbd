"""Semantic universe for dynamic architectures.

Components are snapshots: an identifier, disjoint local/input/output port
sets, and a set-valued message assignment per port.  A healthy universe is a
set of snapshots in which the identifier determines the interface and the
local-port values.  An architecture configuration activates a subset of the
universe and connects input ports to sets of output ports; a configuration
trace is a nonempty finite sequence of configurations over one universe.

Everything here is immutable and all operations are pure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional

from .errors import (
    InactiveComponentError,
    PortDomainError,
    StructuralError,
    UnknownComponentError,
)

# Message atoms are nonempty strings; composite carrier elements are tuples
# (pairs) and frozensets (finite sets) over them.
Value = object

PortRef = tuple[str, str]  # (component id, port name)


def freeze_value(value) -> Value:
    """Normalize nested lists/sets/tuples into the canonical immutable form."""
    if isinstance(value, str):
        if not value:
            raise StructuralError("message names must be nonempty strings")
        return value
    if isinstance(value, tuple):
        return tuple(freeze_value(v) for v in value)
    if isinstance(value, (frozenset, set)):
        return frozenset(freeze_value(v) for v in value)
    raise StructuralError(f"unsupported message value: {value!r}")


def value_key(value: Value):
    """Total order on values, used for deterministic rendering."""
    if isinstance(value, str):
        return (0, value)
    if isinstance(value, tuple):
        return (1, tuple(value_key(v) for v in value))
    return (2, tuple(sorted(value_key(v) for v in value)))


def format_value(value: Value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, tuple):
        return "(" + ", ".join(format_value(v) for v in value) + ")"
    items = sorted(value, key=value_key)
    return "{" + ", ".join(format_value(v) for v in items) + "}"


class PortValuation(Mapping):
    """Immutable map from port name to a finite set of message values."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[str, Iterable] | Iterable = ()):
        table = {}
        for port, messages in dict(entries).items():
            table[port] = frozenset(freeze_value(m) for m in messages)
        self._entries = tuple(sorted(table.items()))

    def __getitem__(self, port: str) -> frozenset:
        for name, messages in self._entries:
            if name == port:
                return messages
        raise KeyError(port)

    def __iter__(self) -> Iterator[str]:
        return iter(name for name, _ in self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __hash__(self) -> int:
        return hash(self._entries)

    def __eq__(self, other) -> bool:
        if isinstance(other, PortValuation):
            return self._entries == other._entries
        return dict(self) == other

    def __repr__(self) -> str:
        inner = ", ".join(f"{p}={format_value(v)}" for p, v in self._entries)
        return f"PortValuation({inner})"


@dataclass(frozen=True)
class ComponentSnapshot:
    """A component at one instant: identifier, port roles, and valuation."""

    id: str
    local_ports: frozenset[str]
    input_ports: frozenset[str]
    output_ports: frozenset[str]
    valuation: PortValuation

    def __post_init__(self):
        object.__setattr__(self, "local_ports", frozenset(self.local_ports))
        object.__setattr__(self, "input_ports", frozenset(self.input_ports))
        object.__setattr__(self, "output_ports", frozenset(self.output_ports))
        if not isinstance(self.valuation, PortValuation):
            object.__setattr__(self, "valuation", PortValuation(self.valuation))
        if not self.id:
            raise StructuralError("component id must be nonempty")
        if (
            self.local_ports & self.input_ports
            or self.local_ports & self.output_ports
            or self.input_ports & self.output_ports
        ):
            raise StructuralError(f"{self.id}: port role sets must be pairwise disjoint")
        expected = self.local_ports | self.input_ports | self.output_ports
        actual = frozenset(self.valuation)
        if expected != actual:
            missing = sorted(expected - actual)
            extra = sorted(actual - expected)
            raise StructuralError(
                f"{self.id}: valuation domain mismatch"
                f" (missing={missing}, extra={extra})"
            )

    @property
    def ports(self) -> frozenset[str]:
        return self.local_ports | self.input_ports | self.output_ports


def make_snapshot(cid: str, local=None, inputs=None, outputs=None) -> ComponentSnapshot:
    """Build a snapshot from per-role ``{port: values}`` mappings."""
    local = dict(local or {})
    inputs = dict(inputs or {})
    outputs = dict(outputs or {})
    valuation = {}
    valuation.update(local)
    valuation.update(inputs)
    valuation.update(outputs)
    return ComponentSnapshot(
        id=cid,
        local_ports=frozenset(local),
        input_ports=frozenset(inputs),
        output_ports=frozenset(outputs),
        valuation=PortValuation(valuation),
    )


@dataclass(frozen=True)
class ComponentUniverse:
    """A set of component snapshots; healthiness is checked, not assumed."""

    snapshots: frozenset[ComponentSnapshot]

    def __post_init__(self):
        object.__setattr__(self, "snapshots", frozenset(self.snapshots))

    def ids(self) -> frozenset[str]:
        return frozenset(c.id for c in self.snapshots)

    def snapshots_of(self, cid: str) -> tuple[ComponentSnapshot, ...]:
        found = [c for c in self.snapshots if c.id == cid]
        found.sort(key=lambda c: hash(c))
        return tuple(found)


@dataclass(frozen=True)
class Violation:
    """One well-formedness failure; violations are data, not faults."""

    code: str
    subject: str
    message: str
    index: Optional[int] = None

    def render(self) -> str:
        where = f" [step {self.index}]" if self.index is not None else ""
        return f"{self.code}: {self.subject}: {self.message}{where}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def at_index(self, index: int) -> "ValidationReport":
        tagged = tuple(
            Violation(v.code, v.subject, v.message, index) for v in self.violations
        )
        return ValidationReport(tagged, self.notes)

    def merge(self, other: "ValidationReport") -> "ValidationReport":
        return ValidationReport(
            self.violations + other.violations, self.notes + other.notes
        )

    def render(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(v.render() for v in self.violations)


def check_healthy(universe: ComponentUniverse) -> ValidationReport:
    """Identifier determines the interface and the local-port values."""
    violations = []
    by_id: dict[str, ComponentSnapshot] = {}
    for snap in sorted(universe.snapshots, key=lambda c: (c.id, hash(c))):
        seen = by_id.get(snap.id)
        if seen is None:
            by_id[snap.id] = snap
            continue
        same_interface = (
            seen.local_ports == snap.local_ports
            and seen.input_ports == snap.input_ports
            and seen.output_ports == snap.output_ports
        )
        if not same_interface:
            violations.append(
                Violation(
                    "interface-mismatch",
                    snap.id,
                    "snapshots with this id declare different port sets",
                )
            )
            continue
        for port in sorted(seen.local_ports):
            if seen.valuation[port] != snap.valuation[port]:
                violations.append(
                    Violation(
                        "local-valuation-mismatch",
                        snap.id,
                        f"local port {port} valued both "
                        f"{format_value(seen.valuation[port])} and "
                        f"{format_value(snap.valuation[port])}",
                    )
                )
    return ValidationReport(tuple(violations))


@dataclass(frozen=True)
class PortGroups:
    local: frozenset[str]
    input: frozenset[str]
    output: frozenset[str]


def ports_of(universe: ComponentUniverse, cid: str) -> PortGroups:
    """The interface of ``cid``, well-defined on healthy universes."""
    for snap in universe.snapshots:
        if snap.id == cid:
            return PortGroups(snap.local_ports, snap.input_ports, snap.output_ports)
    raise UnknownComponentError(f"no component with id {cid!r} in the universe")


def local_valuation(universe: ComponentUniverse, cid: str, port: str) -> frozenset:
    """The fixed value of a local port, well-defined on healthy universes."""
    for snap in universe.snapshots:
        if snap.id == cid:
            if port not in snap.local_ports:
                raise PortDomainError(f"{port!r} is not a local port of {cid!r}")
            return snap.valuation[port]
    raise UnknownComponentError(f"no component with id {cid!r} in the universe")


class ConnectionMap(Mapping):
    """Immutable map from input port refs to sets of output port refs.

    Entries with an empty target set are dropped, so the domain contains
    exactly the connected inputs.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[PortRef, Iterable[PortRef]] | Iterable = ()):
        table = {}
        for src, targets in dict(entries).items():
            src = (str(src[0]), str(src[1]))
            frozen = frozenset((str(c), str(p)) for c, p in targets)
            if frozen:
                table[src] = frozen
        self._entries = tuple(sorted(table.items()))

    def __getitem__(self, ref: PortRef) -> frozenset:
        for src, targets in self._entries:
            if src == ref:
                return targets
        raise KeyError(ref)

    def get(self, ref, default=frozenset()):
        try:
            return self[ref]
        except KeyError:
            return default

    def __iter__(self):
        return iter(src for src, _ in self._entries)

    def __len__(self):
        return len(self._entries)

    def __hash__(self):
        return hash(self._entries)

    def __eq__(self, other):
        if isinstance(other, ConnectionMap):
            return self._entries == other._entries
        return dict(self) == other

    def __repr__(self):
        inner = "; ".join(
            f"{c}.{p} <- " + ", ".join(f"{d}.{q}" for d, q in sorted(ts))
            for (c, p), ts in self._entries
        )
        return f"ConnectionMap({inner})"


@dataclass(frozen=True)
class ArchConfiguration:
    """Active snapshots plus a connection map over their ports."""

    active: frozenset[ComponentSnapshot]
    connection: ConnectionMap = field(default_factory=ConnectionMap)

    def __post_init__(self):
        object.__setattr__(self, "active", frozenset(self.active))
        if not isinstance(self.connection, ConnectionMap):
            object.__setattr__(self, "connection", ConnectionMap(self.connection))

    def active_ids(self) -> frozenset[str]:
        return frozenset(c.id for c in self.active)

    def snapshot_of(self, cid: str) -> ComponentSnapshot:
        for snap in self.active:
            if snap.id == cid:
                return snap
        raise InactiveComponentError(f"component {cid!r} is not active")


def open_input_ports(k: ArchConfiguration) -> frozenset[PortRef]:
    """Active input ports whose connection set is empty or absent."""
    inputs = {
        (snap.id, port) for snap in k.active for port in snap.input_ports
    }
    return frozenset(ref for ref in inputs if not k.connection.get(ref))


def config_valuation(k: ArchConfiguration, cid: str) -> PortValuation:
    """The valuation of the active component with identifier ``cid``."""
    return k.snapshot_of(cid).valuation


def check_configuration(
    universe: ComponentUniverse, k: ArchConfiguration
) -> ValidationReport:
    """Membership, per-id determinism, connection typing, and consistency.

    Consistency is enforced on connected input ports only: the valuation of a
    connected input must equal the union of the connected outputs' values.
    Open inputs are environment inputs and stay unconstrained.
    """
    violations = []
    for snap in sorted(k.active, key=lambda c: (c.id, hash(c))):
        if snap not in universe.snapshots:
            violations.append(
                Violation("not-in-universe", snap.id, "active snapshot not declared")
            )
    by_id: dict[str, ComponentSnapshot] = {}
    for snap in sorted(k.active, key=lambda c: (c.id, hash(c))):
        seen = by_id.get(snap.id)
        if seen is None:
            by_id[snap.id] = snap
        elif seen != snap:
            violations.append(
                Violation(
                    "ambiguous-valuation",
                    snap.id,
                    "two active snapshots with this id differ",
                )
            )
    active_inputs = {(c.id, p) for c in k.active for p in c.input_ports}
    active_outputs = {(c.id, p) for c in k.active for p in c.output_ports}
    for src in k.connection:
        targets = k.connection[src]
        if src not in active_inputs:
            violations.append(
                Violation(
                    "connection-typing",
                    f"{src[0]}.{src[1]}",
                    "connection source is not an active input port",
                )
            )
        for tgt in sorted(targets):
            if tgt not in active_outputs:
                violations.append(
                    Violation(
                        "connection-typing",
                        f"{src[0]}.{src[1]}",
                        f"target {tgt[0]}.{tgt[1]} is not an active output port",
                    )
                )
    # Consistency over connected inputs; skip entries already flagged above.
    for src in k.connection:
        targets = k.connection[src]
        if src not in active_inputs or not targets <= active_outputs:
            continue
        expected = frozenset().union(
            *(by_id[c].valuation[p] for c, p in targets)
        )
        got = by_id[src[0]].valuation[src[1]]
        if got != expected:
            violations.append(
                Violation(
                    "valuation-consistency",
                    f"{src[0]}.{src[1]}",
                    f"input valued {format_value(got)} but connected outputs"
                    f" provide {format_value(expected)}",
                )
            )
    return ValidationReport(tuple(violations))


@dataclass(frozen=True)
class ConfigurationTrace:
    """Nonempty finite sequence of configurations over one universe."""

    universe: ComponentUniverse
    steps: tuple[ArchConfiguration, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps:
            raise StructuralError("a configuration trace must have at least one step")

    def __len__(self) -> int:
        return len(self.steps)


def check_trace(trace: ConfigurationTrace) -> ValidationReport:
    """Universe healthiness plus per-step configuration validity."""
    report = check_healthy(trace.universe)
    for index, step in enumerate(trace.steps):
        step_report = check_configuration(trace.universe, step)
        if not step_report.ok:
            report = report.merge(step_report.at_index(index))
    return report
