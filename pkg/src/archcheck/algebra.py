"""Signatures, finite algebras, datatype terms and assertions.

Carriers are finite ordered sets, which keeps quantifier evaluation and the
models relation decidable.  Two sort constructors are built in: ``pair(S, T)``
with tuple-valued carriers and ``set(S)`` with frozenset-valued carriers
(enumerating a set carrier requires the element carrier to hold at most
eight values).  Equality of terms is definitional: both sides are evaluated
and the carrier elements compared.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .errors import (
    AssignmentError,
    CapacityError,
    SignatureError,
    SortError,
    StructuralError,
)
from .model import Value, format_value, freeze_value, value_key

SET_CARRIER_CAP = 8


# ---------------------------------------------------------------------------
# Sorts


class Sort:
    """Base class for sort expressions."""

    __slots__ = ()


@dataclass(frozen=True)
class BaseSort(Sort):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class PairSort(Sort):
    first: Sort
    second: Sort

    def __str__(self) -> str:
        return f"pair({self.first}, {self.second})"


@dataclass(frozen=True)
class SetSort(Sort):
    element: Sort

    def __str__(self) -> str:
        return f"set({self.element})"


def base_sorts(sort: Sort) -> frozenset[str]:
    if isinstance(sort, BaseSort):
        return frozenset((sort.name,))
    if isinstance(sort, PairSort):
        return base_sorts(sort.first) | base_sorts(sort.second)
    if isinstance(sort, SetSort):
        return base_sorts(sort.element)
    raise SortError(f"unknown sort expression: {sort!r}")


# ---------------------------------------------------------------------------
# Signatures and algebras


@dataclass(frozen=True)
class Signature:
    """Sort names plus typed function and predicate symbols.

    Arity-0 functions are constants; arity-0 predicates are propositional
    atoms.  Function typings are (argument sorts, result sort) pairs.
    """

    sorts: frozenset[str]
    functions: Mapping[str, tuple[tuple[Sort, ...], Sort]] = field(default_factory=dict)
    predicates: Mapping[str, tuple[Sort, ...]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "sorts", frozenset(self.sorts))
        object.__setattr__(self, "functions", dict(self.functions))
        object.__setattr__(self, "predicates", dict(self.predicates))
        for name, (args, result) in self.functions.items():
            for sort in (*args, result):
                self._require_declared(name, sort)
        for name, args in self.predicates.items():
            for sort in args:
                self._require_declared(name, sort)
        overlap = set(self.functions) & set(self.predicates)
        if overlap:
            raise SignatureError(
                f"symbols declared as both function and predicate: {sorted(overlap)}"
            )

    def _require_declared(self, symbol: str, sort: Sort):
        missing = base_sorts(sort) - self.sorts
        if missing:
            raise SignatureError(
                f"symbol {symbol!r} uses undeclared sorts {sorted(missing)}"
            )


@dataclass(frozen=True)
class Algebra:
    """Concrete finite interpretation of a signature.

    ``carriers`` assigns each base sort a nonempty ordered tuple of message
    atoms; ``functions`` are total lookup tables over argument tuples;
    ``predicates`` are sets of argument tuples (closed world).
    """

    signature: Signature
    carriers: Mapping[str, tuple[Value, ...]]
    functions: Mapping[str, Mapping[tuple, Value]] = field(default_factory=dict)
    predicates: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        carriers = {}
        for sort, values in dict(self.carriers).items():
            values = tuple(freeze_value(v) for v in values)
            if not values:
                raise StructuralError(f"carrier of sort {sort} must be nonempty")
            if len(set(values)) != len(values):
                raise StructuralError(f"carrier of sort {sort} has duplicates")
            carriers[sort] = values
        object.__setattr__(self, "carriers", carriers)
        missing = self.signature.sorts - set(carriers)
        if missing:
            raise StructuralError(f"no carrier for sorts {sorted(missing)}")
        functions = {}
        for name, table in dict(self.functions).items():
            functions[name] = {
                tuple(freeze_value(a) for a in args): freeze_value(v)
                for args, v in dict(table).items()
            }
        object.__setattr__(self, "functions", functions)
        predicates = {}
        for name, rows in dict(self.predicates).items():
            predicates[name] = frozenset(
                tuple(freeze_value(a) for a in row) for row in rows
            )
        object.__setattr__(self, "predicates", predicates)
        object.__setattr__(self, "_carrier_cache", {})
        self._validate_tables()

    def _validate_tables(self):
        for name, (args, result) in self.signature.functions.items():
            table = self.functions.get(name)
            if table is None:
                raise StructuralError(f"no table for function symbol {name!r}")
            for row in itertools.product(*(self.carrier(s) for s in args)):
                if row not in table:
                    rendered = ", ".join(format_value(v) for v in row)
                    raise StructuralError(
                        f"function table {name!r} undefined at ({rendered})"
                    )
            for row, value in table.items():
                if not self.contains(value, result):
                    raise StructuralError(
                        f"function table {name!r} maps outside its result carrier"
                    )
        for name, args in self.signature.predicates.items():
            rows = self.predicates.get(name, frozenset())
            for row in rows:
                if len(row) != len(args) or not all(
                    self.contains(v, s) for v, s in zip(row, args)
                ):
                    raise StructuralError(
                        f"predicate table {name!r} holds an ill-sorted tuple"
                    )

    def carrier(self, sort: Sort) -> tuple[Value, ...]:
        """The ordered carrier of a (possibly composite) sort."""
        cache = self._carrier_cache
        if sort in cache:
            return cache[sort]
        if isinstance(sort, BaseSort):
            try:
                result = self.carriers[sort.name]
            except KeyError:
                raise SignatureError(f"no carrier for sort {sort.name!r}") from None
        elif isinstance(sort, PairSort):
            result = tuple(
                (a, b)
                for a in self.carrier(sort.first)
                for b in self.carrier(sort.second)
            )
        elif isinstance(sort, SetSort):
            base = self.carrier(sort.element)
            if len(base) > SET_CARRIER_CAP:
                raise CapacityError(
                    f"cannot enumerate set({sort.element}): element carrier has"
                    f" {len(base)} > {SET_CARRIER_CAP} values",
                    bound=SET_CARRIER_CAP,
                )
            subsets = []
            for size in range(len(base) + 1):
                for combo in itertools.combinations(range(len(base)), size):
                    subsets.append(frozenset(base[i] for i in combo))
            result = tuple(subsets)
        else:
            raise SortError(f"unknown sort expression: {sort!r}")
        cache[sort] = result
        return result

    def contains(self, value: Value, sort: Sort) -> bool:
        """Membership in a carrier, without enumerating set carriers."""
        if isinstance(sort, BaseSort):
            return value in self.carriers.get(sort.name, ())
        if isinstance(sort, PairSort):
            return (
                isinstance(value, tuple)
                and len(value) == 2
                and self.contains(value[0], sort.first)
                and self.contains(value[1], sort.second)
            )
        if isinstance(sort, SetSort):
            return isinstance(value, frozenset) and all(
                self.contains(v, sort.element) for v in value
            )
        raise SortError(f"unknown sort expression: {sort!r}")


# ---------------------------------------------------------------------------
# Terms

# Semantic AST nodes are frozen dataclasses; structural equality is the
# notion of equality everywhere (round-trips, caches, fixtures).


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    name: str
    sort: Sort


@dataclass(frozen=True)
class Apply(Term):
    symbol: str
    args: tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class PairTerm(Term):
    first: Term
    second: Term


@dataclass(frozen=True)
class SetTerm(Term):
    elements: tuple[Term, ...] = ()
    element_sort: Optional[Sort] = None  # required for the empty literal

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))


def constant(symbol: str) -> Apply:
    return Apply(symbol, ())


# ---------------------------------------------------------------------------
# Assertions


class Assertion:
    __slots__ = ()


@dataclass(frozen=True)
class BoolLit(Assertion):
    value: bool


@dataclass(frozen=True)
class PredAtom(Assertion):
    symbol: str
    args: tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Equals(Assertion):
    left: Term
    right: Term


@dataclass(frozen=True)
class Member(Assertion):
    element: Term
    collection: Term


@dataclass(frozen=True)
class Not(Assertion):
    operand: Assertion


@dataclass(frozen=True)
class And(Assertion):
    items: tuple[Assertion, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))


@dataclass(frozen=True)
class Or(Assertion):
    items: tuple[Assertion, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))


@dataclass(frozen=True)
class Implies(Assertion):
    left: Assertion
    right: Assertion


@dataclass(frozen=True)
class Iff(Assertion):
    left: Assertion
    right: Assertion


@dataclass(frozen=True)
class ForallData(Assertion):
    var: str
    sort: Sort
    body: Assertion


@dataclass(frozen=True)
class ExistsData(Assertion):
    var: str
    sort: Sort
    body: Assertion


@dataclass(frozen=True)
class BoundedForall(Assertion):
    """For all elements of an evaluated set-valued term (pattern-bound)."""

    vars: tuple[str, ...]
    source: Term
    body: Assertion

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))


@dataclass(frozen=True)
class BoundedExists(Assertion):
    vars: tuple[str, ...]
    source: Term
    body: Assertion

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))


@dataclass(frozen=True)
class WellFounded(Assertion):
    """Axiom form requiring a binary relation to be acyclic on its carrier.

    Not first-order expressible, hence a built-in rather than user syntax.
    """

    symbol: str


# ---------------------------------------------------------------------------
# Sorting / typechecking


def typecheck_term(
    sig: Signature,
    vars: Mapping[str, Sort],
    term: Term,
    path: tuple[str, ...] = (),
) -> Sort:
    """The unique sort of a well-sorted term; raises SortError otherwise.

    Port symbols and port reads are handled by the callers that extend this
    grammar; here only the datatype fragment is admitted.
    """
    if isinstance(term, Var):
        declared = vars.get(term.name)
        if declared is None:
            raise SortError(f"undeclared variable {term.name!r}", path)
        if declared != term.sort:
            raise SortError(
                f"variable {term.name!r} declared {declared} but annotated {term.sort}",
                path,
            )
        return term.sort
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
            actual = typecheck_term(sig, vars, arg, path + (f"{term.symbol}/arg{i}",))
            if actual != expected:
                raise SortError(
                    f"argument {i} of {term.symbol!r} has sort {actual},"
                    f" expected {expected}",
                    path,
                )
        return result
    if isinstance(term, PairTerm):
        first = typecheck_term(sig, vars, term.first, path + ("pair/first",))
        second = typecheck_term(sig, vars, term.second, path + ("pair/second",))
        return PairSort(first, second)
    if isinstance(term, SetTerm):
        if not term.elements:
            if term.element_sort is None:
                raise SortError("empty set literal needs an element sort", path)
            return SetSort(term.element_sort)
        sorts = {
            typecheck_term(sig, vars, e, path + (f"set/{i}",))
            for i, e in enumerate(term.elements)
        }
        if len(sorts) != 1:
            raise SortError("set literal mixes element sorts", path)
        elem = sorts.pop()
        if term.element_sort is not None and term.element_sort != elem:
            raise SortError("set literal annotation disagrees with elements", path)
        return SetSort(elem)
    raise SortError(f"term {term!r} is not part of the datatype grammar", path)


# ---------------------------------------------------------------------------
# Evaluation


def eval_term(alg: Algebra, asg: Mapping[str, Value], term: Term) -> Value:
    """Value of a well-sorted term under a variable assignment."""
    if isinstance(term, Var):
        try:
            return asg[term.name]
        except KeyError:
            raise AssignmentError(f"unbound variable {term.name!r}") from None
    if isinstance(term, Apply):
        table = alg.functions.get(term.symbol)
        if table is None:
            raise SignatureError(f"no table for function symbol {term.symbol!r}")
        args = tuple(eval_term(alg, asg, a) for a in term.args)
        try:
            return table[args]
        except KeyError:
            rendered = ", ".join(format_value(v) for v in args)
            raise SignatureError(
                f"function table {term.symbol!r} undefined at ({rendered})"
            ) from None
    if isinstance(term, PairTerm):
        return (eval_term(alg, asg, term.first), eval_term(alg, asg, term.second))
    if isinstance(term, SetTerm):
        return frozenset(eval_term(alg, asg, e) for e in term.elements)
    raise SortError(f"cannot evaluate {term!r} in the datatype fragment")


def _bind_pattern(names: tuple[str, ...], value: Value) -> dict[str, Value]:
    if len(names) == 1:
        return {names[0]: value}
    if not isinstance(value, tuple) or len(value) != len(names):
        raise SortError(
            f"pattern ({', '.join(names)}) does not match value {format_value(value)}"
        )
    return dict(zip(names, value))


def assertion_holds(alg: Algebra, asg: Mapping[str, Value], assertion: Assertion) -> bool:
    """Truth of a datatype assertion under one variable assignment."""
    if isinstance(assertion, BoolLit):
        return assertion.value
    if isinstance(assertion, PredAtom):
        rows = alg.predicates.get(assertion.symbol)
        if assertion.symbol not in alg.signature.predicates:
            raise SignatureError(f"unknown predicate symbol {assertion.symbol!r}")
        args = tuple(eval_term(alg, asg, a) for a in assertion.args)
        return args in (rows or frozenset())
    if isinstance(assertion, Equals):
        return eval_term(alg, asg, assertion.left) == eval_term(alg, asg, assertion.right)
    if isinstance(assertion, Member):
        element = eval_term(alg, asg, assertion.element)
        collection = eval_term(alg, asg, assertion.collection)
        if not isinstance(collection, frozenset):
            raise SortError("membership against a non-set value")
        return element in collection
    if isinstance(assertion, Not):
        return not assertion_holds(alg, asg, assertion.operand)
    if isinstance(assertion, And):
        return all(assertion_holds(alg, asg, item) for item in assertion.items)
    if isinstance(assertion, Or):
        return any(assertion_holds(alg, asg, item) for item in assertion.items)
    if isinstance(assertion, Implies):
        return (not assertion_holds(alg, asg, assertion.left)) or assertion_holds(
            alg, asg, assertion.right
        )
    if isinstance(assertion, Iff):
        return assertion_holds(alg, asg, assertion.left) == assertion_holds(
            alg, asg, assertion.right
        )
    if isinstance(assertion, ForallData):
        return all(
            assertion_holds(alg, {**asg, assertion.var: v}, assertion.body)
            for v in alg.carrier(assertion.sort)
        )
    if isinstance(assertion, ExistsData):
        return any(
            assertion_holds(alg, {**asg, assertion.var: v}, assertion.body)
            for v in alg.carrier(assertion.sort)
        )
    if isinstance(assertion, BoundedForall):
        source = eval_term(alg, asg, assertion.source)
        if not isinstance(source, frozenset):
            raise SortError("bounded quantifier over a non-set value")
        return all(
            assertion_holds(alg, {**asg, **_bind_pattern(assertion.vars, v)}, assertion.body)
            for v in sorted(source, key=value_key)
        )
    if isinstance(assertion, BoundedExists):
        source = eval_term(alg, asg, assertion.source)
        if not isinstance(source, frozenset):
            raise SortError("bounded quantifier over a non-set value")
        return any(
            assertion_holds(alg, {**asg, **_bind_pattern(assertion.vars, v)}, assertion.body)
            for v in sorted(source, key=value_key)
        )
    if isinstance(assertion, WellFounded):
        return check_well_founded(alg, assertion.symbol)
    raise SortError(f"assertion {assertion!r} is not part of the datatype grammar")


def free_data_vars(node) -> dict[str, Sort]:
    """Free datatype variables (name -> sort) of a term or assertion."""
    free: dict[str, Sort] = {}

    def walk(item, bound: frozenset):
        if isinstance(item, Var):
            if item.name not in bound:
                previous = free.get(item.name)
                if previous is not None and previous != item.sort:
                    raise SortError(
                        f"variable {item.name!r} used at two sorts:"
                        f" {previous} and {item.sort}"
                    )
                free[item.name] = item.sort
            return
        if isinstance(item, (ForallData, ExistsData)):
            walk(item.body, bound | {item.var})
            return
        if isinstance(item, (BoundedForall, BoundedExists)):
            walk(item.source, bound)
            walk(item.body, bound | set(item.vars))
            return
        for child in _children(item):
            walk(child, bound)

    walk(node, frozenset())
    return free


def _children(node):
    if isinstance(node, Apply):
        return node.args
    if isinstance(node, PairTerm):
        return (node.first, node.second)
    if isinstance(node, SetTerm):
        return node.elements
    if isinstance(node, PredAtom):
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
    return ()


def enumerate_assignments(
    alg: Algebra,
    variables: Mapping[str, Sort],
    base: Optional[Mapping[str, Value]] = None,
):
    """All assignments of the given variables over their finite carriers."""
    names = sorted(variables)
    domains = [alg.carrier(variables[n]) for n in names]
    for combo in itertools.product(*domains):
        asg = dict(base or {})
        asg.update(zip(names, combo))
        yield asg


def models_spec(alg: Algebra, assertions: Iterable[Assertion]) -> bool:
    """True iff every assertion holds under every assignment of its free vars."""
    for assertion in assertions:
        variables = free_data_vars(assertion)
        for asg in enumerate_assignments(alg, variables):
            if not assertion_holds(alg, asg, assertion):
                return False
    return True


def check_well_founded(alg: Algebra, symbol: str) -> bool:
    """Acyclicity of a binary same-sorted relation, equivalent on finite
    carriers to the absence of infinite descending chains."""
    typing = alg.signature.predicates.get(symbol)
    if typing is None:
        raise SignatureError(f"unknown predicate symbol {symbol!r}")
    if len(typing) != 2 or typing[0] != typing[1]:
        raise SignatureError(
            f"well-founded requires a binary relation over one sort,"
            f" got {symbol!r}: {tuple(str(s) for s in typing)}"
        )
    rows = alg.predicates.get(symbol, frozenset())
    adjacency: dict[Value, set] = {}
    for a, b in rows:
        adjacency.setdefault(a, set()).add(b)
    WHITE, GREY, BLACK = 0, 1, 2
    color: dict[Value, int] = {}

    def has_cycle(node) -> bool:
        color[node] = GREY
        for nxt in adjacency.get(node, ()):
            state = color.get(nxt, WHITE)
            if state == GREY:
                return True
            if state == WHITE and has_cycle(nxt):
                return True
        color[node] = BLACK
        return False

    for start in adjacency:
        if color.get(start, WHITE) == WHITE and has_cycle(start):
            return False
    return True
