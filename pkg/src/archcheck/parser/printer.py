"""Canonical text rendering of source units.

`parse_unit(print_unit(u))` reproduces `u` up to structural equality; the
printer emits ASCII operators and a fixed section order.
"""
from __future__ import annotations

from .syntax import (
    AlgebraBody,
    ConstraintsBody,
    DatatypeBody,
    DiagramBody,
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
    ENum,
    EPair,
    EQuant,
    ESet,
    EUnary,
    EWellFounded,
    InterfaceBody,
    PortSpecBody,
    RName,
    RPair,
    RSet,
    SortRef,
    SourceUnit,
    TraceBody,
)

_BINARY_LEVEL = {"<->": 1, "->": 2, "or": 3, "and": 4, "U": 5, "W": 5}
_RIGHT_ASSOC = {"->", "U", "W"}
_COMPARE_LEVEL = 7
_UNARY_LEVEL = 6


def print_sort(ref: SortRef) -> str:
    if isinstance(ref, RName):
        return ref.name
    if isinstance(ref, RSet):
        return f"set({print_sort(ref.element)})"
    if isinstance(ref, RPair):
        return f"pair({print_sort(ref.first)}, {print_sort(ref.second)})"
    raise TypeError(f"not a sort reference: {ref!r}")


def print_expr(expr, required: int = 0) -> str:
    text, level = _render(expr)
    if level < required:
        return f"({text})"
    return text


def _render(expr):
    if isinstance(expr, EName):
        return expr.name, 9
    if isinstance(expr, ENum):
        return str(expr.value), 9
    if isinstance(expr, EBool):
        return ("true" if expr.value else "false"), 9
    if isinstance(expr, EDot):
        return f"{expr.base}.{expr.attr}", 9
    if isinstance(expr, EApply):
        args = ", ".join(print_expr(a, 0) for a in expr.args)
        return f"{expr.name}({args})", 9
    if isinstance(expr, EPair):
        return f"({print_expr(expr.first, 0)}, {print_expr(expr.second, 0)})", 9
    if isinstance(expr, ESet):
        inner = ", ".join(print_expr(e, 0) for e in expr.items)
        return "{" + (f" {inner} " if inner else "") + "}", 9
    if isinstance(expr, EUnary):
        operand = print_expr(expr.operand, _UNARY_LEVEL)
        joiner = " " if expr.op in ("not", "X", "F", "G") else ""
        return f"{expr.op}{joiner}{operand}", _UNARY_LEVEL
    if isinstance(expr, EBinary):
        if expr.op in ("==", "in"):
            left = print_expr(expr.left, 8)
            right = print_expr(expr.right, 8)
            return f"{left} {expr.op} {right}", _COMPARE_LEVEL
        level = _BINARY_LEVEL[expr.op]
        if expr.op in _RIGHT_ASSOC:
            left = print_expr(expr.left, level + 1)
            right = print_expr(expr.right, level)
        else:
            left = print_expr(expr.left, level)
            right = print_expr(expr.right, level + 1)
        return f"{left} {expr.op} {right}", level
    if isinstance(expr, EQuant):
        if expr.bound is not None:
            if len(expr.names) == 2:
                binder = f"({expr.names[0]}, {expr.names[1]})"
            else:
                binder = expr.names[0]
            head = f"{expr.kind} {binder} in {print_expr(expr.bound, 8)}"
            body = print_expr(expr.body, 0)
            if isinstance(expr.bound, EName):
                # a bare-name bound would greedily absorb a leading dotted
                # read of the body; parenthesizing the body keeps the binder
                # dot unambiguous
                body = f"({body})"
            return f"{head} . {body}", 0
        head = f"{expr.kind} {expr.names[0]}"
        if expr.annotation is not None:
            head += f" : {print_sort(expr.annotation)}"
        return f"{head} . {print_expr(expr.body, 0)}", 0
    if isinstance(expr, EActive):
        return f"active({expr.var})", 9
    if isinstance(expr, EConn):
        return (
            f"conn({expr.in_var}.{expr.in_port} <- {expr.out_var}.{expr.out_port})",
            9,
        )
    if isinstance(expr, EIRConn):
        return (
            f"irconn({expr.in_interface}.{expr.in_port}"
            f" <- {expr.out_interface}.{expr.out_port})",
            9,
        )
    if isinstance(expr, EMin):
        return f"min({expr.interface}, {expr.count})", 9
    if isinstance(expr, EMax):
        return f"max({expr.interface}, {expr.count})", 9
    if isinstance(expr, EMinMax):
        return f"minmax({expr.interface}, {expr.low}, {expr.high})", 9
    if isinstance(expr, EWellFounded):
        return f"well-founded({expr.symbol})", 9
    raise TypeError(f"not an expression: {expr!r}")


def _var_lines(decls, out):
    for decl in decls:
        out.append(f"  {', '.join(decl.names)} : {print_sort(decl.sort)}")


def _axiom_lines(axioms, out):
    for axiom in axioms:
        out.append(f"  {print_expr(axiom.expr)}")


def print_unit(unit: SourceUnit) -> str:
    out = [f"{unit.kind} {unit.name}"]
    if unit.imports:
        out.append(f"imports {', '.join(unit.imports)}")
    body = unit.body
    if isinstance(body, DatatypeBody):
        if body.sorts:
            out.append("sorts")
            out.append(f"  {', '.join(body.sorts)}")
        if body.symbols:
            out.append("symbols")
            for sym in body.symbols:
                args = " * ".join(print_sort(a) for a in sym.args)
                if sym.result is None:
                    out.append(f"  {sym.name} : {args}")
                elif args:
                    out.append(f"  {sym.name} : {args} -> {print_sort(sym.result)}")
                else:
                    out.append(f"  {sym.name} : -> {print_sort(sym.result)}")
        if body.vars:
            out.append("vars")
            _var_lines(body.vars, out)
        if body.axioms:
            out.append("axioms")
            _axiom_lines(body.axioms, out)
    elif isinstance(body, PortSpecBody):
        if body.ports:
            out.append("ports")
            _var_lines(body.ports, out)
    elif isinstance(body, InterfaceBody):
        if body.ports:
            out.append("ports")
            _var_lines(body.ports, out)
        if body.local:
            out.append(f"local {', '.join(body.local)}")
        if body.inputs:
            out.append(f"inputs {', '.join(body.inputs)}")
        if body.outputs:
            out.append(f"outputs {', '.join(body.outputs)}")
        if body.vars:
            out.append("vars")
            _var_lines(body.vars, out)
        if body.axioms:
            out.append("axioms")
            _axiom_lines(body.axioms, out)
    elif isinstance(body, ConstraintsBody):
        if body.vars:
            out.append("vars")
            _var_lines(body.vars, out)
        if body.rigid_vars:
            out.append("rigid vars")
            _var_lines(body.rigid_vars, out)
        if body.axioms:
            out.append("axioms")
            _axiom_lines(body.axioms, out)
    elif isinstance(body, DiagramBody):
        if body.ports:
            out.append("ports")
            _var_lines(body.ports, out)
        if body.vars:
            out.append("vars")
            _var_lines(body.vars, out)
        if body.rigid_vars:
            out.append("rigid vars")
            _var_lines(body.rigid_vars, out)
        for iface in body.interfaces:
            suffix = _minmax_suffix(iface.minmax)
            out.append(f"interface {iface.name}{suffix}")
            if iface.local:
                out.append(f"  local {', '.join(iface.local)}")
            if iface.inputs:
                out.append(f"  inputs {', '.join(iface.inputs)}")
            if iface.outputs:
                out.append(f"  outputs {', '.join(iface.outputs)}")
        for ann in body.rigid_annotations:
            out.append(f"rigid {ann.interface} : {', '.join(ann.vars)}")
        for conn in body.connects:
            out.append(
                f"connect {conn.in_owner}.{conn.in_port}"
                f" <- {conn.out_owner}.{conn.out_port}"
            )
        for iface, axioms in body.axioms:
            out.append(f"axioms {iface}")
            _axiom_lines(axioms, out)
    elif isinstance(body, AlgebraBody):
        if body.carriers:
            out.append("carriers")
            for carrier in body.carriers:
                elems = ", ".join(carrier.elements)
                out.append(f"  {carrier.sort} = {{ {elems} }}")
        if body.functions:
            out.append("functions")
            for entry in body.functions:
                args = ", ".join(print_expr(a) for a in entry.args)
                head = f"{entry.symbol}({args})" if entry.args else entry.symbol
                out.append(f"  {head} = {print_expr(entry.value)}")
        if body.predicates:
            out.append("predicates")
            for entry in body.predicates:
                args = ", ".join(print_expr(a) for a in entry.args)
                out.append(f"  {entry.symbol}({args})")
    elif isinstance(body, TraceBody):
        if body.components:
            out.append("components")
            for comp in body.components:
                line = f"  {comp.id} : {comp.interface}"
                if comp.locals:
                    parts = ", ".join(
                        f"{port} = {print_expr(value)}" for port, value in comp.locals
                    )
                    line += f" with {parts}"
                out.append(line)
        for step in body.steps:
            out.append("step")
            for active in step.actives:
                out.append(f"  active {active.id}")
                for port, value in active.valuations:
                    out.append(f"    {port} = {print_expr(value)}")
            for conn in step.connects:
                out.append(
                    f"  connect {conn.in_owner}.{conn.in_port}"
                    f" <- {conn.out_owner}.{conn.out_port}"
                )
    else:
        raise TypeError(f"unknown unit body {type(body).__name__}")
    return "\n".join(out) + "\n"


def _minmax_suffix(minmax) -> str:
    if minmax is None:
        return ""
    low, high = minmax
    if low is not None and low == high:
        return f" [{low}]"
    if low is None:
        return f" [..{high}]"
    if high is None:
        return f" [{low}..]"
    return f" [{low}..{high}]"
