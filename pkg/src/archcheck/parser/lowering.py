"""Lowering from the semantic AST back onto raw syntax, for printing.

The inverse direction of the resolver, used to render desugared diagram
assertions in concrete syntax.  Flexible quantifiers come out with inline
interface/sort annotations so the printed text resolves without extra
variable declarations.
"""
from __future__ import annotations

from .. import algebra as ALG
from .. import constraints as CON
from ..interfaces import PortSym
from .syntax import (
    EActive,
    EApply,
    EBinary,
    EBool,
    EConn,
    EDot,
    EIRConn,
    EMax,
    EMin,
    EMinMax,
    EName,
    EPair,
    EQuant,
    ESet,
    EUnary,
    EWellFounded,
    RName,
    RPair,
    RSet,
)


def lower_sort(sort: ALG.Sort):
    if isinstance(sort, ALG.BaseSort):
        return RName(sort.name)
    if isinstance(sort, ALG.SetSort):
        return RSet(lower_sort(sort.element))
    if isinstance(sort, ALG.PairSort):
        return RPair(lower_sort(sort.first), lower_sort(sort.second))
    raise TypeError(f"not a sort: {sort!r}")


def lower_term(term):
    if isinstance(term, ALG.Var):
        return EName(term.name)
    if isinstance(term, ALG.Apply):
        if not term.args:
            return EName(term.symbol)
        return EApply(term.symbol, tuple(lower_term(a) for a in term.args))
    if isinstance(term, ALG.PairTerm):
        return EPair(lower_term(term.first), lower_term(term.second))
    if isinstance(term, ALG.SetTerm):
        return ESet(tuple(lower_term(e) for e in term.elements))
    if isinstance(term, PortSym):
        return EName(term.port)
    if isinstance(term, CON.PortRead):
        return EDot(term.var, term.port)
    raise TypeError(f"not a term: {term!r}")


def _fold(op, items):
    out = lower_formula(items[0])
    for item in items[1:]:
        out = EBinary(op, out, lower_formula(item))
    return out


def lower_formula(node):
    # configuration-assertion level
    if isinstance(node, ALG.BoolLit):
        return EBool(node.value)
    if isinstance(node, ALG.PredAtom):
        return EApply(node.symbol, tuple(lower_term(a) for a in node.args))
    if isinstance(node, ALG.Equals):
        return EBinary("==", lower_term(node.left), lower_term(node.right))
    if isinstance(node, ALG.Member):
        return EBinary("in", lower_term(node.element), lower_term(node.collection))
    if isinstance(node, ALG.Not):
        return EUnary("not", lower_formula(node.operand))
    if isinstance(node, ALG.And):
        return _fold("and", node.items)
    if isinstance(node, ALG.Or):
        return _fold("or", node.items)
    if isinstance(node, ALG.Implies):
        return EBinary("->", lower_formula(node.left), lower_formula(node.right))
    if isinstance(node, ALG.Iff):
        return EBinary("<->", lower_formula(node.left), lower_formula(node.right))
    if isinstance(node, ALG.ForallData):
        return EQuant(
            "forall", (node.var,), lower_sort(node.sort), None,
            lower_formula(node.body),
        )
    if isinstance(node, ALG.ExistsData):
        return EQuant(
            "exists", (node.var,), lower_sort(node.sort), None,
            lower_formula(node.body),
        )
    if isinstance(node, (ALG.BoundedForall, ALG.BoundedExists)):
        kind = "forall" if isinstance(node, ALG.BoundedForall) else "exists"
        return EQuant(
            kind, node.vars, None, lower_term(node.source), lower_formula(node.body)
        )
    if isinstance(node, ALG.WellFounded):
        return EWellFounded(node.symbol)
    if isinstance(node, CON.CompEquals):
        return EBinary("==", EName(node.left), EName(node.right))
    if isinstance(node, CON.Active):
        return EActive(node.var)
    if isinstance(node, CON.Conn):
        return EConn(node.in_var, node.in_port, node.out_var, node.out_port)
    if isinstance(node, CON.IRConn):
        return EIRConn(
            node.in_interface, node.in_port, node.out_interface, node.out_port
        )
    if isinstance(node, CON.Min):
        return EMin(node.interface, node.count)
    if isinstance(node, CON.Max):
        return EMax(node.interface, node.count)
    if isinstance(node, CON.MinMax):
        return EMinMax(node.interface, node.low, node.high)
    if isinstance(node, CON.ForallComp):
        return EQuant(
            "forall", (node.var,), RName(node.interface), None,
            lower_formula(node.body),
        )
    if isinstance(node, CON.ExistsComp):
        return EQuant(
            "exists", (node.var,), RName(node.interface), None,
            lower_formula(node.body),
        )
    # trace-assertion level
    if isinstance(node, CON.State):
        return lower_formula(node.formula)
    if isinstance(node, CON.TraceNot):
        return EUnary("not", lower_formula(node.operand))
    if isinstance(node, CON.TraceAnd):
        return _fold("and", node.items)
    if isinstance(node, CON.TraceOr):
        return _fold("or", node.items)
    if isinstance(node, CON.TraceImplies):
        return EBinary("->", lower_formula(node.left), lower_formula(node.right))
    if isinstance(node, CON.TraceIff):
        return EBinary("<->", lower_formula(node.left), lower_formula(node.right))
    if isinstance(node, CON.Next):
        return EUnary("X", lower_formula(node.body))
    if isinstance(node, CON.Eventually):
        return EUnary("F", lower_formula(node.body))
    if isinstance(node, CON.Globally):
        return EUnary("G", lower_formula(node.body))
    if isinstance(node, CON.Until):
        return EBinary("U", lower_formula(node.left), lower_formula(node.right))
    if isinstance(node, CON.WeakUntil):
        return EBinary("W", lower_formula(node.left), lower_formula(node.right))
    if isinstance(node, CON.RigidForallData):
        return EQuant(
            "forall", (node.var,), lower_sort(node.sort), None,
            lower_formula(node.body),
        )
    if isinstance(node, CON.RigidExistsData):
        return EQuant(
            "exists", (node.var,), lower_sort(node.sort), None,
            lower_formula(node.body),
        )
    if isinstance(node, CON.RigidForallComp):
        return EQuant(
            "forall", (node.var,), RName(node.interface), None,
            lower_formula(node.body),
        )
    if isinstance(node, CON.RigidExistsComp):
        return EQuant(
            "exists", (node.var,), RName(node.interface), None,
            lower_formula(node.body),
        )
    if isinstance(node, (CON.BoundedRigidForall, CON.BoundedRigidExists)):
        kind = "forall" if isinstance(node, CON.BoundedRigidForall) else "exists"
        return EQuant(
            kind, node.vars, None, lower_term(node.source), lower_formula(node.body)
        )
    raise TypeError(f"not a formula: {node!r}")
