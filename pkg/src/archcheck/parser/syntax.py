"""Raw syntax trees for `.arch` source units.

These nodes mirror the concrete syntax one-to-one and carry source spans for
diagnostics; spans never participate in equality, so parse/print round trips
compare structurally.  Name resolution and sort checking happen later, in the
resolver, which lowers these trees onto the semantic AST.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

UNIT_KINDS = (
    "datatype",
    "portspec",
    "interface",
    "constraints",
    "diagram",
    "algebra",
    "trace",
)


@dataclass(frozen=True)
class Span:
    line: int  # 1-based
    column: int  # 1-based
    end_column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


def _nospan():
    return None


SPAN = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    message: str
    span: Optional[Span] = None
    unit: Optional[str] = None

    def render(self) -> str:
        where = ""
        if self.unit:
            where += self.unit
        if self.span:
            where += f":{self.span}"
        if where:
            where += ": "
        return f"{where}{self.severity}[{self.code}]: {self.message}"


class ExprNode:
    __slots__ = ()


@dataclass(frozen=True)
class EName(ExprNode):
    name: str
    span: Optional[Span] = SPAN


@dataclass(frozen=True)
class ENum(ExprNode):
    value: int
    span: Optional[Span] = SPAN


@dataclass(frozen=True)
class EBool(ExprNode):
    value: bool
    span: Optional[Span] = SPAN


@dataclass(frozen=True)
class EDot(ExprNode):
    base: str
    attr: str
    span: Optional[Span] = SPAN


@dataclass(frozen=True)
class EApply(ExprNode):
    name: str
    args: tuple[ExprNode, ...]
    span: Optional[Span] = SPAN

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class EPair(ExprNode):
    first: ExprNode
    second: ExprNode
    span: Optional[Span] = SPAN


@dataclass(frozen=True)
class ESet(ExprNode):
    items: tuple[ExprNode, ...]
    span: Optional[Span] = SPAN

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))


@dataclass(frozen=True)
class EUnary(ExprNode):
    op: str  # not | X | F | G
    operand: ExprNode
    span: Optional[Span] = SPAN


@dataclass(frozen=True)
class EBinary(ExprNode):
    op: str  # U | W | and | or | -> | <-> | == | in
    left: ExprNode
    right: ExprNode
    span: Optional[Span] = SPAN


@dataclass(frozen=True)
class EQuant(ExprNode):
    kind: str  # forall | exists
    names: tuple[str, ...]
    annotation: Optional["SortRef"]  # sort or interface annotation
    bound: Optional[ExprNode]  # set-valued term for bounded quantifiers
    body: ExprNode
    span: Optional[Span] = SPAN

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))


@dataclass(frozen=True)
class EActive(ExprNode):
    var: str
    span: Optional[Span] = SPAN


@dataclass(frozen=True)
class EConn(ExprNode):
    in_var: str
    in_port: str
    out_var: str
    out_port: str
    span: Optional[Span] = SPAN


@dataclass(frozen=True)
class EIRConn(ExprNode):
    in_interface: str
    in_port: str
    out_interface: str
    out_port: str
    span: Optional[Span] = SPAN


@dataclass(frozen=True)
class EMin(ExprNode):
    interface: str
    count: int
    span: Optional[Span] = SPAN


@dataclass(frozen=True)
class EMax(ExprNode):
    interface: str
    count: int
    span: Optional[Span] = SPAN


@dataclass(frozen=True)
class EMinMax(ExprNode):
    interface: str
    low: int
    high: int
    span: Optional[Span] = SPAN


@dataclass(frozen=True)
class EWellFounded(ExprNode):
    symbol: str
    span: Optional[Span] = SPAN


# ---------------------------------------------------------------------------
# Sort references


class SortRef:
    __slots__ = ()


@dataclass(frozen=True)
class RName(SortRef):
    name: str
    span: Optional[Span] = SPAN


@dataclass(frozen=True)
class RSet(SortRef):
    element: SortRef
    span: Optional[Span] = SPAN


@dataclass(frozen=True)
class RPair(SortRef):
    first: SortRef
    second: SortRef
    span: Optional[Span] = SPAN


# ---------------------------------------------------------------------------
# Declarations


@dataclass(frozen=True)
class VarDecl:
    names: tuple[str, ...]
    sort: SortRef
    span: Optional[Span] = SPAN

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))


@dataclass(frozen=True)
class PortDecl:
    names: tuple[str, ...]
    sort: SortRef
    span: Optional[Span] = SPAN

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))


@dataclass(frozen=True)
class SymbolDecl:
    name: str
    args: tuple[SortRef, ...]
    result: Optional[SortRef]  # None marks a predicate
    span: Optional[Span] = SPAN

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class AxiomDecl:
    expr: ExprNode
    text: str = field(compare=False, default="")
    span: Optional[Span] = SPAN


@dataclass(frozen=True)
class InterfaceDecl:
    name: str
    local: tuple[str, ...] = ()
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()
    minmax: Optional[tuple[Optional[int], Optional[int]]] = None
    span: Optional[Span] = SPAN

    def __post_init__(self):
        object.__setattr__(self, "local", tuple(self.local))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))


@dataclass(frozen=True)
class RigidAnnDecl:
    interface: str
    vars: tuple[str, ...]
    span: Optional[Span] = SPAN

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))


@dataclass(frozen=True)
class ConnectDecl:
    in_owner: str
    in_port: str
    out_owner: str
    out_port: str
    span: Optional[Span] = SPAN


@dataclass(frozen=True)
class CarrierDecl:
    sort: str
    elements: tuple[str, ...]
    span: Optional[Span] = SPAN

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))


@dataclass(frozen=True)
class TableEntry:
    symbol: str
    args: tuple[ExprNode, ...]
    value: Optional[ExprNode]  # None for predicate rows
    span: Optional[Span] = SPAN

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class ComponentDecl:
    id: str
    interface: str
    locals: tuple[tuple[str, ExprNode], ...] = ()
    span: Optional[Span] = SPAN

    def __post_init__(self):
        object.__setattr__(self, "locals", tuple(self.locals))


@dataclass(frozen=True)
class ActiveDecl:
    id: str
    valuations: tuple[tuple[str, ExprNode], ...] = ()
    span: Optional[Span] = SPAN

    def __post_init__(self):
        object.__setattr__(self, "valuations", tuple(self.valuations))


@dataclass(frozen=True)
class StepDecl:
    actives: tuple[ActiveDecl, ...] = ()
    connects: tuple[ConnectDecl, ...] = ()
    span: Optional[Span] = SPAN

    def __post_init__(self):
        object.__setattr__(self, "actives", tuple(self.actives))
        object.__setattr__(self, "connects", tuple(self.connects))


# ---------------------------------------------------------------------------
# Unit bodies


@dataclass(frozen=True)
class DatatypeBody:
    sorts: tuple[str, ...] = ()
    symbols: tuple[SymbolDecl, ...] = ()
    vars: tuple[VarDecl, ...] = ()
    axioms: tuple[AxiomDecl, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sorts", tuple(self.sorts))
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "axioms", tuple(self.axioms))


@dataclass(frozen=True)
class PortSpecBody:
    ports: tuple[PortDecl, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ports", tuple(self.ports))


@dataclass(frozen=True)
class InterfaceBody:
    ports: tuple[PortDecl, ...] = ()
    local: tuple[str, ...] = ()
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()
    vars: tuple[VarDecl, ...] = ()
    axioms: tuple[AxiomDecl, ...] = ()

    def __post_init__(self):
        for name in ("ports", "local", "inputs", "outputs", "vars", "axioms"):
            object.__setattr__(self, name, tuple(getattr(self, name)))


@dataclass(frozen=True)
class ConstraintsBody:
    vars: tuple[VarDecl, ...] = ()
    rigid_vars: tuple[VarDecl, ...] = ()
    axioms: tuple[AxiomDecl, ...] = ()

    def __post_init__(self):
        for name in ("vars", "rigid_vars", "axioms"):
            object.__setattr__(self, name, tuple(getattr(self, name)))


@dataclass(frozen=True)
class DiagramBody:
    ports: tuple[PortDecl, ...] = ()
    vars: tuple[VarDecl, ...] = ()
    rigid_vars: tuple[VarDecl, ...] = ()
    interfaces: tuple[InterfaceDecl, ...] = ()
    rigid_annotations: tuple[RigidAnnDecl, ...] = ()
    connects: tuple[ConnectDecl, ...] = ()
    axioms: tuple[tuple[str, tuple[AxiomDecl, ...]], ...] = ()

    def __post_init__(self):
        for name in ("ports", "vars", "rigid_vars", "interfaces",
                     "rigid_annotations", "connects"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(
            self,
            "axioms",
            tuple((iface, tuple(items)) for iface, items in self.axioms),
        )


@dataclass(frozen=True)
class AlgebraBody:
    carriers: tuple[CarrierDecl, ...] = ()
    functions: tuple[TableEntry, ...] = ()
    predicates: tuple[TableEntry, ...] = ()

    def __post_init__(self):
        for name in ("carriers", "functions", "predicates"):
            object.__setattr__(self, name, tuple(getattr(self, name)))


@dataclass(frozen=True)
class TraceBody:
    components: tuple[ComponentDecl, ...] = ()
    steps: tuple[StepDecl, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "steps", tuple(self.steps))


@dataclass(frozen=True)
class SourceUnit:
    kind: str
    name: str
    imports: tuple[str, ...]
    body: object

    def __post_init__(self):
        object.__setattr__(self, "imports", tuple(self.imports))
        if self.kind not in UNIT_KINDS:
            raise ValueError(f"unknown unit kind {self.kind!r}")
