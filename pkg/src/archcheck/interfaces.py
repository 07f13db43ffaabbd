"""Port specifications, interfaces, and their interpretations by components.

A port is declared with the sort of the messages it carries; since port
valuations are set-valued, a port term denotes the whole message set and its
value sort is ``set(declared sort)``.  Equality between a port term and an
element-sorted term is therefore resolved to a singleton-set equation by the
front end; membership is the primitive reading.

Interface terms extend datatype terms with port symbols.  The local-port
clause of the term semantics is an extension over the published input/output
clauses; specs relying on it are flagged in the check report.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .algebra import (
    Algebra,
    And,
    Apply,
    Assertion,
    BoolLit,
    BoundedExists,
    BoundedForall,
    Equals,
    ExistsData,
    ForallData,
    Iff,
    Implies,
    Member,
    Not,
    Or,
    PairSort,
    PairTerm,
    PredAtom,
    SetSort,
    SetTerm,
    Sort,
    Term,
    Var,
    WellFounded,
    check_well_founded,
    enumerate_assignments,
    eval_term,
    free_data_vars,
    typecheck_term,
    value_key,
)
from .errors import (
    AssignmentError,
    InterpretationError,
    SortError,
    StructuralError,
    UnknownComponentError,
)
from .model import (
    ComponentSnapshot,
    ComponentUniverse,
    ValidationReport,
    Violation,
    check_healthy,
    format_value,
)


@dataclass(frozen=True)
class PortSpec:
    """Port identifiers with the sort of the messages each port carries."""

    ports: Mapping[str, Sort]

    def __post_init__(self):
        object.__setattr__(self, "ports", dict(self.ports))

    def sort_of(self, port: str) -> Sort:
        try:
            return self.ports[port]
        except KeyError:
            raise SortError(f"undeclared port identifier {port!r}") from None


@dataclass(frozen=True)
class Interface:
    """Disjoint local/input/output port identifier sets from a PortSpec."""

    local: frozenset[str] = frozenset()
    inputs: frozenset[str] = frozenset()
    outputs: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "local", frozenset(self.local))
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        if (
            self.local & self.inputs
            or self.local & self.outputs
            or self.inputs & self.outputs
        ):
            raise StructuralError("interface port roles must be pairwise disjoint")

    @property
    def ports(self) -> frozenset[str]:
        return self.local | self.inputs | self.outputs


@dataclass(frozen=True)
class InterfaceSpec:
    """Named interfaces plus per-interface assertion sets (component types)."""

    interfaces: Mapping[str, Interface]
    assertions: Mapping[str, tuple[Assertion, ...]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "interfaces", dict(self.interfaces))
        normalized = {
            name: tuple(items) for name, items in dict(self.assertions).items()
        }
        object.__setattr__(self, "assertions", normalized)
        for name in normalized:
            if name not in self.interfaces:
                raise StructuralError(
                    f"assertions attached to undeclared interface {name!r}"
                )

    def interface(self, name: str) -> Interface:
        try:
            return self.interfaces[name]
        except KeyError:
            raise UnknownComponentError(f"undeclared interface {name!r}") from None

    def input_ports(self) -> frozenset[tuple[str, str]]:
        return frozenset(
            (name, p) for name, iface in self.interfaces.items() for p in iface.inputs
        )

    def output_ports(self) -> frozenset[tuple[str, str]]:
        return frozenset(
            (name, p) for name, iface in self.interfaces.items() for p in iface.outputs
        )


# ---------------------------------------------------------------------------
# Interface terms: port symbols as term leaves


@dataclass(frozen=True)
class PortSym(Term):
    """A port identifier used as a term; denotes the port's message set."""

    port: str
    sort: Sort  # declared element sort; the term's value sort is set(sort)


def _bijection(mapping: Mapping[str, str], domain: frozenset[str], what: str):
    mapping = dict(mapping)
    if set(mapping) != set(domain):
        raise InterpretationError(f"{what} map does not cover the snapshot ports")
    values = list(mapping.values())
    if len(set(values)) != len(values):
        raise InterpretationError(f"{what} map is not injective")
    return mapping


@dataclass(frozen=True)
class InterfaceInterpretation:
    """A snapshot with bijections from its concrete ports to interface ports."""

    snapshot: ComponentSnapshot
    local_map: Mapping[str, str] = field(default_factory=dict)
    input_map: Mapping[str, str] = field(default_factory=dict)
    output_map: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self,
            "local_map",
            _bijection(self.local_map, self.snapshot.local_ports, "local"),
        )
        object.__setattr__(
            self,
            "input_map",
            _bijection(self.input_map, self.snapshot.input_ports, "input"),
        )
        object.__setattr__(
            self,
            "output_map",
            _bijection(self.output_map, self.snapshot.output_ports, "output"),
        )

    def __hash__(self):
        return hash(
            (
                self.snapshot,
                tuple(sorted(self.local_map.items())),
                tuple(sorted(self.input_map.items())),
                tuple(sorted(self.output_map.items())),
            )
        )

    def port_ids(self) -> frozenset[str]:
        return (
            frozenset(self.local_map.values())
            | frozenset(self.input_map.values())
            | frozenset(self.output_map.values())
        )

    def concrete_port(self, port_id: str) -> str:
        """Inverse of the role maps: interface port id -> concrete port."""
        for mapping in (self.local_map, self.input_map, self.output_map):
            for concrete, pid in mapping.items():
                if pid == port_id:
                    return concrete
        raise InterpretationError(
            f"port id {port_id!r} is not interpreted by component {self.snapshot.id!r}"
        )

    def port_value(self, port_id: str) -> frozenset:
        return self.snapshot.valuation[self.concrete_port(port_id)]

    def matches(self, interface: Interface) -> bool:
        return (
            frozenset(self.local_map.values()) == interface.local
            and frozenset(self.input_map.values()) == interface.inputs
            and frozenset(self.output_map.values()) == interface.outputs
        )


def identity_interpretation(snapshot: ComponentSnapshot) -> InterfaceInterpretation:
    """Interpretation whose concrete port names equal the interface port ids."""
    return InterfaceInterpretation(
        snapshot=snapshot,
        local_map={p: p for p in snapshot.local_ports},
        input_map={p: p for p in snapshot.input_ports},
        output_map={p: p for p in snapshot.output_ports},
    )


@dataclass(frozen=True)
class SpecInterpretation:
    """Per interface identifier, the set of interpreting components."""

    by_interface: Mapping[str, frozenset[InterfaceInterpretation]]

    def __post_init__(self):
        normalized = {
            name: frozenset(items)
            for name, items in dict(self.by_interface).items()
        }
        object.__setattr__(self, "by_interface", normalized)

    def interface_of(self, cid: str) -> Optional[str]:
        for name, interps in self.by_interface.items():
            for interp in interps:
                if interp.snapshot.id == cid:
                    return name
        return None

    def interpretations_of(self, cid: str) -> tuple[InterfaceInterpretation, ...]:
        found = [
            interp
            for interps in self.by_interface.values()
            for interp in interps
            if interp.snapshot.id == cid
        ]
        found.sort(key=lambda it: hash(it))
        return tuple(found)

    def ids_of(self, interface_id: str) -> tuple[str, ...]:
        try:
            interps = self.by_interface[interface_id]
        except KeyError:
            raise UnknownComponentError(
                f"undeclared interface {interface_id!r}"
            ) from None
        return tuple(sorted({i.snapshot.id for i in interps}))

    def universe(self) -> ComponentUniverse:
        return ComponentUniverse(
            frozenset(
                interp.snapshot
                for interps in self.by_interface.values()
                for interp in interps
            )
        )


def components_of(J: SpecInterpretation, interface_id: str) -> frozenset[ComponentSnapshot]:
    """All components interpreting one interface identifier."""
    try:
        interps = J.by_interface[interface_id]
    except KeyError:
        raise UnknownComponentError(f"undeclared interface {interface_id!r}") from None
    return frozenset(interp.snapshot for interp in interps)


# ---------------------------------------------------------------------------
# Typing and evaluation


def check_port_typing(
    interp: InterfaceInterpretation, pspec: PortSpec, alg: Algebra
) -> ValidationReport:
    """Every port's valuation must be a subset of its declared sort's carrier."""
    violations = []
    for mapping in (interp.local_map, interp.input_map, interp.output_map):
        for concrete, pid in sorted(mapping.items()):
            sort = pspec.sort_of(pid)
            for message in sorted(interp.snapshot.valuation[concrete], key=value_key):
                if not alg.contains(message, sort):
                    violations.append(
                        Violation(
                            "port-typing",
                            f"{interp.snapshot.id}.{concrete}",
                            f"message {format_value(message)} is not of sort {sort}",
                        )
                    )
    return ValidationReport(tuple(violations))


def typecheck_interface_term(
    sig, pspec: PortSpec, vars: Mapping[str, Sort], term: Term,
    path: tuple[str, ...] = (),
) -> Sort:
    """Sort of an interface term; a port symbol has value sort set(declared)."""
    if isinstance(term, PortSym):
        declared = pspec.sort_of(term.port)
        if declared != term.sort:
            raise SortError(
                f"port {term.port!r} declared {declared} but annotated {term.sort}",
                path,
            )
        return SetSort(declared)
    if isinstance(term, Apply):
        typing = sig.functions.get(term.symbol)
        if typing is None:
            raise SortError(f"unknown function symbol {term.symbol!r}", path)
        arg_sorts, result = typing
        if len(arg_sorts) != len(term.args):
            raise SortError(
                f"{term.symbol!r} expects {len(arg_sorts)} arguments,"
                f" got {len(term.args)}",
                path,
            )
        for i, (arg, expected) in enumerate(zip(term.args, arg_sorts)):
            actual = typecheck_interface_term(
                sig, pspec, vars, arg, path + (f"{term.symbol}/arg{i}",)
            )
            if actual != expected:
                raise SortError(
                    f"argument {i} of {term.symbol!r} has sort {actual},"
                    f" expected {expected}",
                    path,
                )
        return result
    if isinstance(term, PairTerm):
        first = typecheck_interface_term(
            sig, pspec, vars, term.first, path + ("pair/first",)
        )
        second = typecheck_interface_term(
            sig, pspec, vars, term.second, path + ("pair/second",)
        )
        return PairSort(first, second)
    if isinstance(term, SetTerm) and term.elements:
        sorts = {
            typecheck_interface_term(sig, pspec, vars, e, path + (f"set/{i}",))
            for i, e in enumerate(term.elements)
        }
        if len(sorts) != 1:
            raise SortError("set literal mixes element sorts", path)
        return SetSort(sorts.pop())
    return typecheck_term(sig, vars, term, path)


def eval_interface_term(
    alg: Algebra,
    asg: Mapping[str, object],
    interp: InterfaceInterpretation,
    term: Term,
):
    """Value of an interface term: port symbols read the snapshot valuation
    through the role bijections (local ports via the extension clause)."""
    if isinstance(term, PortSym):
        return interp.port_value(term.port)
    if isinstance(term, Var):
        try:
            return asg[term.name]
        except KeyError:
            raise AssignmentError(f"unbound variable {term.name!r}") from None
    if isinstance(term, Apply):
        args = tuple(eval_interface_term(alg, asg, interp, a) for a in term.args)
        table = alg.functions[term.symbol]
        return table[args]
    if isinstance(term, PairTerm):
        return (
            eval_interface_term(alg, asg, interp, term.first),
            eval_interface_term(alg, asg, interp, term.second),
        )
    if isinstance(term, SetTerm):
        return frozenset(eval_interface_term(alg, asg, interp, e) for e in term.elements)
    return eval_term(alg, asg, term)


def interface_assertion_holds(
    alg: Algebra,
    asg: Mapping[str, object],
    interp: InterfaceInterpretation,
    assertion: Assertion,
) -> bool:
    """Truth of an interface assertion under one data assignment."""

    def ev(term):
        return eval_interface_term(alg, asg, interp, term)

    if isinstance(assertion, BoolLit):
        return assertion.value
    if isinstance(assertion, PredAtom):
        rows = alg.predicates.get(assertion.symbol, frozenset())
        return tuple(ev(a) for a in assertion.args) in rows
    if isinstance(assertion, Equals):
        return ev(assertion.left) == ev(assertion.right)
    if isinstance(assertion, Member):
        collection = ev(assertion.collection)
        if not isinstance(collection, frozenset):
            raise SortError("membership against a non-set value")
        return ev(assertion.element) in collection
    if isinstance(assertion, Not):
        return not interface_assertion_holds(alg, asg, interp, assertion.operand)
    if isinstance(assertion, And):
        return all(
            interface_assertion_holds(alg, asg, interp, item)
            for item in assertion.items
        )
    if isinstance(assertion, Or):
        return any(
            interface_assertion_holds(alg, asg, interp, item)
            for item in assertion.items
        )
    if isinstance(assertion, Implies):
        return (
            not interface_assertion_holds(alg, asg, interp, assertion.left)
        ) or interface_assertion_holds(alg, asg, interp, assertion.right)
    if isinstance(assertion, Iff):
        return interface_assertion_holds(
            alg, asg, interp, assertion.left
        ) == interface_assertion_holds(alg, asg, interp, assertion.right)
    if isinstance(assertion, ForallData):
        return all(
            interface_assertion_holds(
                alg, {**asg, assertion.var: v}, interp, assertion.body
            )
            for v in alg.carrier(assertion.sort)
        )
    if isinstance(assertion, ExistsData):
        return any(
            interface_assertion_holds(
                alg, {**asg, assertion.var: v}, interp, assertion.body
            )
            for v in alg.carrier(assertion.sort)
        )
    if isinstance(assertion, (BoundedForall, BoundedExists)):
        source = ev(assertion.source)
        if not isinstance(source, frozenset):
            raise SortError("bounded quantifier over a non-set value")
        results = (
            interface_assertion_holds(
                alg,
                {**asg, **_bind(assertion.vars, v)},
                interp,
                assertion.body,
            )
            for v in sorted(source, key=value_key)
        )
        if isinstance(assertion, BoundedForall):
            return all(results)
        return any(results)
    if isinstance(assertion, WellFounded):
        return check_well_founded(alg, assertion.symbol)
    raise SortError(f"assertion {assertion!r} is not an interface assertion")


def _bind(names, value):
    if len(names) == 1:
        return {names[0]: value}
    if not isinstance(value, tuple) or len(value) != len(names):
        raise SortError(f"pattern ({', '.join(names)}) does not match {format_value(value)}")
    return dict(zip(names, value))


def uses_local_port(assertion: Assertion, interface: Interface) -> bool:
    """Whether the assertion reads a local port (published semantics covers
    only input/output port symbols; local reads use our extension clause)."""
    stack = [assertion]
    while stack:
        node = stack.pop()
        if isinstance(node, PortSym) and node.port in interface.local:
            return True
        stack.extend(_subnodes(node))
    return False


def _subnodes(node):
    if isinstance(node, (PredAtom, Apply)):
        return node.args
    if isinstance(node, Equals):
        return (node.left, node.right)
    if isinstance(node, Member):
        return (node.element, node.collection)
    if isinstance(node, Not):
        return (node.operand,)
    if isinstance(node, (And, Or)):
        return node.items
    if isinstance(node, (Implies, Iff)):
        return (node.left, node.right)
    if isinstance(node, (ForallData, ExistsData)):
        return (node.body,)
    if isinstance(node, (BoundedForall, BoundedExists)):
        return (node.source, node.body)
    if isinstance(node, PairTerm):
        return (node.first, node.second)
    if isinstance(node, SetTerm):
        return node.elements
    return ()


def check_spec_interpretation(
    J: SpecInterpretation,
    spec: InterfaceSpec,
    pspec: PortSpec,
    alg: Algebra,
) -> ValidationReport:
    """Id-disjointness, union healthiness, typing, and the assertion sets.

    Each interpretation must model its interface's assertions under every
    data assignment (enumerated over the finite carriers).
    """
    violations = []
    notes = []
    owners: dict[str, str] = {}
    for name in sorted(J.by_interface):
        if name not in spec.interfaces:
            violations.append(
                Violation("unknown-interface", name, "no such interface declared")
            )
            continue
        for interp in sorted(J.by_interface[name], key=lambda it: it.snapshot.id):
            cid = interp.snapshot.id
            prior = owners.get(cid)
            if prior is not None and prior != name:
                violations.append(
                    Violation(
                        "interface-overlap",
                        cid,
                        f"interpreted under both {prior!r} and {name!r}",
                    )
                )
            owners.setdefault(cid, name)
    health = check_healthy(J.universe())
    violations.extend(health.violations)
    for name in sorted(J.by_interface):
        interface = spec.interfaces.get(name)
        if interface is None:
            continue
        assertions = spec.assertions.get(name, ())
        flagged_local = False
        for interp in sorted(
            J.by_interface[name], key=lambda it: (it.snapshot.id, hash(it))
        ):
            if not interp.matches(interface):
                violations.append(
                    Violation(
                        "interface-shape",
                        interp.snapshot.id,
                        f"port maps do not target the ports of interface {name!r}",
                    )
                )
                continue
            typing = check_port_typing(interp, pspec, alg)
            violations.extend(typing.violations)
            for idx, assertion in enumerate(assertions):
                if not flagged_local and uses_local_port(assertion, interface):
                    notes.append(
                        f"extension: local-port term (interface {name}, assertion {idx + 1})"
                    )
                    flagged_local = True
                variables = free_data_vars(assertion)
                ok = all(
                    interface_assertion_holds(alg, asg, interp, assertion)
                    for asg in enumerate_assignments(alg, variables)
                )
                if not ok:
                    violations.append(
                        Violation(
                            "interface-assertion",
                            interp.snapshot.id,
                            f"violates assertion {idx + 1} of interface {name!r}",
                        )
                    )
    return ValidationReport(tuple(violations), tuple(notes))
