"""Recursive-descent parser for `.arch` source units.

One unit per file.  Recovery is per line: a malformed line yields one error
diagnostic and parsing resumes on the next line; any error makes the whole
unit a failure (no partially parsed units escape).
"""
from __future__ import annotations

from typing import Optional

from .lexer import Token, lex_line
from .syntax import (
    ActiveDecl,
    AlgebraBody,
    AxiomDecl,
    CarrierDecl,
    ComponentDecl,
    ConnectDecl,
    ConstraintsBody,
    DatatypeBody,
    Diagnostic,
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
    InterfaceDecl,
    PortDecl,
    PortSpecBody,
    RName,
    RPair,
    RSet,
    RigidAnnDecl,
    SortRef,
    SourceUnit,
    Span,
    StepDecl,
    SymbolDecl,
    TableEntry,
    TraceBody,
    UNIT_KINDS,
    VarDecl,
)

FORMULA_KEYWORDS = {
    "forall", "exists", "in", "not", "and", "or", "true", "false",
    "X", "F", "G", "U", "W",
    "active", "conn", "irconn", "min", "max", "minmax",
}


class LineError(Exception):
    def __init__(self, message: str, span: Optional[Span]):
        super().__init__(message)
        self.message = message
        self.span = span


class Cursor:
    """Token cursor over a single line."""

    def __init__(self, tokens: list[Token], line_no: int):
        self.tokens = tokens
        self.pos = 0
        self.line_no = line_no

    def peek(self, offset=0) -> Optional[Token]:
        index = self.pos + offset
        return self.tokens[index] if index < len(self.tokens) else None

    def at(self, text: str, offset=0) -> bool:
        token = self.peek(offset)
        return token is not None and token.text == text

    def at_ident(self, offset=0) -> bool:
        token = self.peek(offset)
        return token is not None and token.kind == "ident"

    def take(self) -> Token:
        token = self.peek()
        if token is None:
            raise LineError("unexpected end of line", self.end_span())
        self.pos += 1
        return token

    def expect(self, text: str) -> Token:
        token = self.peek()
        if token is None or token.text != text:
            got = token.text if token else "end of line"
            raise LineError(f"expected {text!r}, got {got!r}",
                            token.span if token else self.end_span())
        return self.take()

    def expect_ident(self, what="identifier") -> Token:
        token = self.peek()
        if token is None or token.kind != "ident":
            got = token.text if token else "end of line"
            raise LineError(f"expected {what}, got {got!r}",
                            token.span if token else self.end_span())
        return self.take()

    def expect_number(self) -> int:
        token = self.peek()
        if token is None or token.kind != "number":
            got = token.text if token else "end of line"
            raise LineError(f"expected a number, got {got!r}",
                            token.span if token else self.end_span())
        self.take()
        return int(token.text)

    def expect_end(self):
        token = self.peek()
        if token is not None:
            raise LineError(f"unexpected trailing {token.text!r}", token.span)

    def end_span(self) -> Span:
        if self.tokens:
            last = self.tokens[-1].span
            return Span(last.line, last.end_column, last.end_column + 1)
        return Span(self.line_no, 1, 2)


# ---------------------------------------------------------------------------
# Expressions


def parse_formula(cur: Cursor):
    return _parse_iff(cur)


def _parse_iff(cur: Cursor):
    left = _parse_implies(cur)
    while cur.at("<->"):
        span = cur.take().span
        right = _parse_implies(cur)
        left = EBinary("<->", left, right, span=span)
    return left


def _parse_implies(cur: Cursor):
    left = _parse_or(cur)
    if cur.at("->"):
        span = cur.take().span
        right = _parse_implies(cur)
        return EBinary("->", left, right, span=span)
    return left


def _parse_or(cur: Cursor):
    left = _parse_and(cur)
    while cur.at("or"):
        span = cur.take().span
        left = EBinary("or", left, _parse_and(cur), span=span)
    return left


def _parse_and(cur: Cursor):
    left = _parse_until(cur)
    while cur.at("and"):
        span = cur.take().span
        left = EBinary("and", left, _parse_until(cur), span=span)
    return left


def _parse_until(cur: Cursor):
    left = _parse_unary(cur)
    if cur.at("U") or cur.at("W"):
        op = cur.take()
        right = _parse_until(cur)
        return EBinary(op.text, left, right, span=op.span)
    return left


def _parse_unary(cur: Cursor):
    token = cur.peek()
    if token is not None and token.text in ("not", "X", "F", "G"):
        cur.take()
        return EUnary(token.text, _parse_unary(cur), span=token.span)
    if token is not None and token.text in ("forall", "exists"):
        return _parse_quantifier(cur)
    return _parse_compare(cur)


def _parse_quantifier(cur: Cursor):
    kw = cur.take()
    names: list[str] = []
    annotation = None
    bound = None
    if cur.at("("):
        cur.take()
        names.append(cur.expect_ident("variable").text)
        cur.expect(",")
        names.append(cur.expect_ident("variable").text)
        cur.expect(")")
        cur.expect("in")
        bound = _parse_bound_term(cur)
    else:
        names.append(cur.expect_ident("variable").text)
        if cur.at(":"):
            cur.take()
            annotation = parse_sortref(cur)
        if cur.at("in"):
            if annotation is not None:
                raise LineError(
                    "a quantifier takes either a sort annotation or a bound,"
                    " not both",
                    cur.peek().span,
                )
            cur.take()
            bound = _parse_bound_term(cur)
    cur.expect(".")
    body = _parse_iff(cur)
    return EQuant(kw.text, tuple(names), annotation, bound, body, span=kw.span)


def _parse_bound_term(cur: Cursor):
    """A set-valued term before the binder dot of a bounded quantifier.

    The dot doubles as the port-read separator, so an identifier only takes
    a ``.port`` suffix here when yet another dot follows (the binder's).
    """
    token = cur.peek()
    if token is not None and token.kind == "ident" and not cur.at("(", 1):
        cur.take()
        if cur.at(".") and cur.at_ident(1) and cur.at(".", 2):
            cur.take()
            attr = cur.take()
            return EDot(token.text, attr.text, span=token.span)
        return EName(token.text, span=token.span)
    return _parse_primary(cur)


def _parse_compare(cur: Cursor):
    left = _parse_primary(cur)
    if cur.at("==") or cur.at("="):
        span = cur.take().span
        return EBinary("==", left, _parse_primary(cur), span=span)
    if cur.at("in"):
        span = cur.take().span
        return EBinary("in", left, _parse_primary(cur), span=span)
    return left


def _parse_primary(cur: Cursor):
    token = cur.peek()
    if token is None:
        raise LineError("unexpected end of line", cur.end_span())
    if token.text == "(":
        cur.take()
        first = _parse_iff(cur)
        if cur.at(","):
            cur.take()
            second = _parse_iff(cur)
            cur.expect(")")
            return EPair(first, second, span=token.span)
        cur.expect(")")
        return first
    if token.text == "{":
        cur.take()
        items = []
        if not cur.at("}"):
            items.append(_parse_iff(cur))
            while cur.at(","):
                cur.take()
                items.append(_parse_iff(cur))
        cur.expect("}")
        return ESet(tuple(items), span=token.span)
    if token.text == "true":
        cur.take()
        return EBool(True, span=token.span)
    if token.text == "false":
        cur.take()
        return EBool(False, span=token.span)
    if token.kind == "number":
        cur.take()
        return ENum(int(token.text), span=token.span)
    if token.kind == "wf":
        cur.take()
        cur.expect("(")
        symbol = cur.expect_ident("relation symbol").text
        cur.expect(")")
        return EWellFounded(symbol, span=token.span)
    if token.text == "active":
        cur.take()
        cur.expect("(")
        var = cur.expect_ident("component variable").text
        cur.expect(")")
        return EActive(var, span=token.span)
    if token.text in ("conn", "irconn"):
        cur.take()
        cur.expect("(")
        left_owner = cur.expect_ident().text
        cur.expect(".")
        left_port = cur.expect_ident().text
        cur.expect("<-")
        right_owner = cur.expect_ident().text
        cur.expect(".")
        right_port = cur.expect_ident().text
        cur.expect(")")
        cls = EConn if token.text == "conn" else EIRConn
        return cls(left_owner, left_port, right_owner, right_port, span=token.span)
    if token.text in ("min", "max"):
        cur.take()
        cur.expect("(")
        iface = cur.expect_ident("interface").text
        cur.expect(",")
        count = cur.expect_number()
        cur.expect(")")
        cls = EMin if token.text == "min" else EMax
        return cls(iface, count, span=token.span)
    if token.text == "minmax":
        cur.take()
        cur.expect("(")
        iface = cur.expect_ident("interface").text
        cur.expect(",")
        low = cur.expect_number()
        cur.expect(",")
        high = cur.expect_number()
        cur.expect(")")
        return EMinMax(iface, low, high, span=token.span)
    if token.kind == "ident":
        cur.take()
        if cur.at("("):
            cur.take()
            args = []
            if not cur.at(")"):
                args.append(_parse_iff(cur))
                while cur.at(","):
                    cur.take()
                    args.append(_parse_iff(cur))
            cur.expect(")")
            return EApply(token.text, tuple(args), span=token.span)
        if cur.at(".") and cur.at_ident(1):
            cur.take()
            attr = cur.take()
            return EDot(token.text, attr.text, span=token.span)
        return EName(token.text, span=token.span)
    raise LineError(f"unexpected {token.text!r}", token.span)


def parse_sortref(cur: Cursor) -> SortRef:
    token = cur.expect_ident("sort")
    if token.text == "set":
        cur.expect("(")
        element = parse_sortref(cur)
        cur.expect(")")
        return RSet(element, span=token.span)
    if token.text == "pair":
        cur.expect("(")
        first = parse_sortref(cur)
        cur.expect(",")
        second = parse_sortref(cur)
        cur.expect(")")
        return RPair(first, second, span=token.span)
    return RName(token.text, span=token.span)


def _parse_ident_list(cur: Cursor) -> list[str]:
    names = [cur.expect_ident().text]
    while cur.at(","):
        cur.take()
        names.append(cur.expect_ident().text)
    return names


def _parse_var_decl(cur: Cursor) -> VarDecl:
    span = cur.peek().span if cur.peek() else None
    names = _parse_ident_list(cur)
    cur.expect(":")
    sort = parse_sortref(cur)
    cur.expect_end()
    return VarDecl(tuple(names), sort, span=span)


def _parse_port_decl(cur: Cursor) -> PortDecl:
    span = cur.peek().span if cur.peek() else None
    names = _parse_ident_list(cur)
    cur.expect(":")
    sort = parse_sortref(cur)
    cur.expect_end()
    return PortDecl(tuple(names), sort, span=span)


def _parse_symbol_decl(cur: Cursor) -> SymbolDecl:
    name = cur.expect_ident("symbol name")
    cur.expect(":")
    if cur.at("->"):
        cur.take()
        result = parse_sortref(cur)
        cur.expect_end()
        return SymbolDecl(name.text, (), result, span=name.span)
    args = [parse_sortref(cur)]
    while cur.at("*"):
        cur.take()
        args.append(parse_sortref(cur))
    result = None
    if cur.at("->"):
        cur.take()
        result = parse_sortref(cur)
    cur.expect_end()
    return SymbolDecl(name.text, tuple(args), result, span=name.span)


def _parse_connect(cur: Cursor) -> ConnectDecl:
    span = cur.expect("connect").span
    in_owner = cur.expect_ident().text
    cur.expect(".")
    in_port = cur.expect_ident().text
    cur.expect("<-")
    out_owner = cur.expect_ident().text
    cur.expect(".")
    out_port = cur.expect_ident().text
    cur.expect_end()
    return ConnectDecl(in_owner, in_port, out_owner, out_port, span=span)


def _parse_minmax_suffix(cur: Cursor):
    """``[n]``, ``[n..m]``, ``[n..]``, or ``[..m]`` after an interface name."""
    span = cur.expect("[").span
    low = high = None
    if cur.peek() is not None and cur.peek().kind == "number":
        low = cur.expect_number()
    if cur.at(".."):
        cur.take()
        if cur.peek() is not None and cur.peek().kind == "number":
            high = cur.expect_number()
    else:
        high = low
    cur.expect("]")
    if low is None and high is None:
        raise LineError("empty min-max annotation", span)
    return (low, high)


# ---------------------------------------------------------------------------
# Unit parsing


class _UnitParser:
    def __init__(self, text: str):
        self.diagnostics: list[Diagnostic] = []
        self.lines: list[tuple[int, str, list[Token]]] = []
        for line_no, raw in enumerate(text.splitlines(), start=1):
            tokens, diag = lex_line(raw, line_no)
            if diag is not None:
                self.diagnostics.append(diag)
                continue
            if tokens:
                self.lines.append((line_no, raw.strip(), tokens))
        self.index = 0

    def error(self, message, span=None):
        self.diagnostics.append(Diagnostic("error", "parse", message, span))

    def next_line(self):
        if self.index >= len(self.lines):
            return None
        line = self.lines[self.index]
        self.index += 1
        return line

    def peek_line(self):
        return self.lines[self.index] if self.index < len(self.lines) else None

    def parse(self):
        header = self.next_line()
        if header is None:
            self.error("expected unit header")
            return None
        _, _, tokens = header
        cur = Cursor(tokens, header[0])
        try:
            kind_tok = cur.expect_ident("unit kind")
            if kind_tok.text not in UNIT_KINDS:
                raise LineError(
                    f"unknown unit kind {kind_tok.text!r}", kind_tok.span
                )
            name = cur.expect_ident("unit name").text
            cur.expect_end()
        except LineError as err:
            self.error(err.message, err.span)
            return None
        kind = kind_tok.text
        imports = self._parse_imports()
        body = getattr(self, f"_parse_{kind}")()
        if any(d.severity == "error" for d in self.diagnostics):
            return None
        return SourceUnit(kind=kind, name=name, imports=tuple(imports), body=body)

    def _parse_imports(self):
        imports = []
        while True:
            line = self.peek_line()
            if line is None or line[2][0].text != "imports":
                return imports
            self.next_line()
            cur = Cursor(line[2], line[0])
            cur.take()
            try:
                imports.extend(_parse_ident_list(cur))
                cur.expect_end()
            except LineError as err:
                self.error(err.message, err.span)
        return imports

    def _each_line(self, handler):
        """Feed every remaining line to handler with per-line recovery."""
        while True:
            line = self.next_line()
            if line is None:
                return
            line_no, text, tokens = line
            cur = Cursor(tokens, line_no)
            try:
                handler(cur, text)
            except LineError as err:
                self.error(err.message, err.span)

    # -- datatype ----------------------------------------------------------

    def _parse_datatype(self):
        sorts: list[str] = []
        symbols: list[SymbolDecl] = []
        vars_: list[VarDecl] = []
        axioms: list[AxiomDecl] = []
        section = [None]

        def handler(cur: Cursor, text: str):
            head = cur.peek()
            if head.text in ("sorts", "symbols", "vars", "axioms") and (
                cur.peek(1) is None
            ):
                section[0] = head.text
                return
            if section[0] == "sorts":
                sorts.extend(_parse_ident_list(cur))
                cur.expect_end()
            elif section[0] == "symbols":
                symbols.append(_parse_symbol_decl(cur))
            elif section[0] == "vars":
                vars_.append(_parse_var_decl(cur))
            elif section[0] == "axioms":
                span = head.span
                expr = parse_formula(cur)
                cur.expect_end()
                axioms.append(AxiomDecl(expr, text=text, span=span))
            else:
                raise LineError(
                    "expected a section header (sorts, symbols, vars, axioms)",
                    head.span,
                )

        self._each_line(handler)
        return DatatypeBody(tuple(sorts), tuple(symbols), tuple(vars_), tuple(axioms))

    # -- portspec -----------------------------------------------------------

    def _parse_portspec(self):
        ports: list[PortDecl] = []
        section = [None]

        def handler(cur: Cursor, text: str):
            head = cur.peek()
            if head.text == "ports" and cur.peek(1) is None:
                section[0] = "ports"
                return
            if section[0] == "ports":
                ports.append(_parse_port_decl(cur))
            else:
                raise LineError("expected the `ports` section header", head.span)

        self._each_line(handler)
        return PortSpecBody(tuple(ports))

    # -- interface ----------------------------------------------------------

    def _parse_interface(self):
        ports: list[PortDecl] = []
        local: list[str] = []
        inputs: list[str] = []
        outputs: list[str] = []
        vars_: list[VarDecl] = []
        axioms: list[AxiomDecl] = []
        section = [None]
        roles = {"local": local, "inputs": inputs, "outputs": outputs}

        def handler(cur: Cursor, text: str):
            head = cur.peek()
            if head.text in ("ports", "vars", "axioms") and cur.peek(1) is None:
                section[0] = head.text
                return
            if head.text in roles:
                cur.take()
                roles[head.text].extend(_parse_ident_list(cur))
                cur.expect_end()
                return
            if section[0] == "ports":
                ports.append(_parse_port_decl(cur))
            elif section[0] == "vars":
                vars_.append(_parse_var_decl(cur))
            elif section[0] == "axioms":
                span = head.span
                expr = parse_formula(cur)
                cur.expect_end()
                axioms.append(AxiomDecl(expr, text=text, span=span))
            else:
                raise LineError(
                    "expected ports/vars/axioms section or local/inputs/outputs",
                    head.span,
                )

        self._each_line(handler)
        return InterfaceBody(
            tuple(ports), tuple(local), tuple(inputs), tuple(outputs),
            tuple(vars_), tuple(axioms),
        )

    # -- constraints ----------------------------------------------------------

    def _parse_constraints(self):
        vars_: list[VarDecl] = []
        rigid_vars: list[VarDecl] = []
        axioms: list[AxiomDecl] = []
        section = [None]

        def handler(cur: Cursor, text: str):
            head = cur.peek()
            if head.text == "vars" and cur.peek(1) is None:
                section[0] = "vars"
                return
            if head.text == "rigid" and cur.at("vars", 1) and cur.peek(2) is None:
                section[0] = "rigid vars"
                return
            if head.text == "axioms" and cur.peek(1) is None:
                section[0] = "axioms"
                return
            if section[0] == "vars":
                vars_.append(_parse_var_decl(cur))
            elif section[0] == "rigid vars":
                rigid_vars.append(_parse_var_decl(cur))
            elif section[0] == "axioms":
                span = head.span
                expr = parse_formula(cur)
                cur.expect_end()
                axioms.append(AxiomDecl(expr, text=text, span=span))
            else:
                raise LineError(
                    "expected vars, rigid vars, or axioms section", head.span
                )

        self._each_line(handler)
        return ConstraintsBody(tuple(vars_), tuple(rigid_vars), tuple(axioms))

    # -- diagram ----------------------------------------------------------

    def _parse_diagram(self):
        ports: list[PortDecl] = []
        vars_: list[VarDecl] = []
        rigid_vars: list[VarDecl] = []
        interfaces: list[InterfaceDecl] = []
        rigid_ann: list[RigidAnnDecl] = []
        connects: list[ConnectDecl] = []
        axioms: list[tuple[str, list[AxiomDecl]]] = []
        # context: (mode, payload) with mode in {None, section, iface, axioms}
        state = {"section": None, "iface": None, "axioms": None}

        def reset():
            if state["iface"] is not None:
                interfaces.append(_close_interface(state["iface"]))
                state["iface"] = None
            state["section"] = None
            state["axioms"] = None

        def handler(cur: Cursor, text: str):
            head = cur.peek()
            if head.text in ("ports", "vars") and cur.peek(1) is None:
                reset()
                state["section"] = head.text
                return
            if head.text == "rigid" and cur.at("vars", 1) and cur.peek(2) is None:
                reset()
                state["section"] = "rigid vars"
                return
            if head.text == "rigid":
                reset()
                cur.take()
                iface = cur.expect_ident("interface").text
                cur.expect(":")
                names = _parse_ident_list(cur)
                cur.expect_end()
                rigid_ann.append(RigidAnnDecl(iface, tuple(names), span=head.span))
                return
            if head.text == "interface":
                reset()
                cur.take()
                name = cur.expect_ident("interface name").text
                minmax = None
                if cur.at("["):
                    minmax = _parse_minmax_suffix(cur)
                cur.expect_end()
                state["iface"] = {
                    "name": name, "minmax": minmax, "span": head.span,
                    "local": [], "inputs": [], "outputs": [],
                }
                return
            if head.text in ("local", "inputs", "outputs"):
                if state["iface"] is None:
                    raise LineError(
                        f"{head.text!r} outside an interface block", head.span
                    )
                cur.take()
                state["iface"][head.text].extend(_parse_ident_list(cur))
                cur.expect_end()
                return
            if head.text == "connect":
                reset()
                connects.append(_parse_connect(cur))
                return
            if head.text == "axioms":
                reset()
                cur.take()
                iface = cur.expect_ident("interface").text
                cur.expect_end()
                block: list[AxiomDecl] = []
                axioms.append((iface, block))
                state["axioms"] = block
                return
            if state["axioms"] is not None:
                span = head.span
                expr = parse_formula(cur)
                cur.expect_end()
                state["axioms"].append(AxiomDecl(expr, text=text, span=span))
                return
            if state["section"] == "ports":
                ports.append(_parse_port_decl(cur))
                return
            if state["section"] == "vars":
                vars_.append(_parse_var_decl(cur))
                return
            if state["section"] == "rigid vars":
                rigid_vars.append(_parse_var_decl(cur))
                return
            raise LineError("unexpected line in diagram unit", head.span)

        self._each_line(handler)
        if state["iface"] is not None:
            interfaces.append(_close_interface(state["iface"]))
        return DiagramBody(
            ports=tuple(ports),
            vars=tuple(vars_),
            rigid_vars=tuple(rigid_vars),
            interfaces=tuple(interfaces),
            rigid_annotations=tuple(rigid_ann),
            connects=tuple(connects),
            axioms=tuple((iface, tuple(block)) for iface, block in axioms),
        )

    # -- algebra ----------------------------------------------------------

    def _parse_algebra(self):
        carriers: list[CarrierDecl] = []
        functions: list[TableEntry] = []
        predicates: list[TableEntry] = []
        section = [None]

        def handler(cur: Cursor, text: str):
            head = cur.peek()
            if head.text in ("carriers", "functions", "predicates") and (
                cur.peek(1) is None
            ):
                section[0] = head.text
                return
            if section[0] == "carriers":
                sort = cur.expect_ident("sort").text
                cur.expect("=")
                cur.expect("{")
                elements = []
                if not cur.at("}"):
                    elements = _parse_ident_list(cur)
                cur.expect("}")
                cur.expect_end()
                carriers.append(CarrierDecl(sort, tuple(elements), span=head.span))
            elif section[0] == "functions":
                name = cur.expect_ident("function symbol").text
                args: list = []
                if cur.at("("):
                    cur.take()
                    if not cur.at(")"):
                        args.append(_parse_primary(cur))
                        while cur.at(","):
                            cur.take()
                            args.append(_parse_primary(cur))
                    cur.expect(")")
                cur.expect("=")
                value = _parse_primary(cur)
                cur.expect_end()
                functions.append(
                    TableEntry(name, tuple(args), value, span=head.span)
                )
            elif section[0] == "predicates":
                name = cur.expect_ident("predicate symbol").text
                cur.expect("(")
                args = []
                if not cur.at(")"):
                    args.append(_parse_primary(cur))
                    while cur.at(","):
                        cur.take()
                        args.append(_parse_primary(cur))
                cur.expect(")")
                cur.expect_end()
                predicates.append(TableEntry(name, tuple(args), None, span=head.span))
            else:
                raise LineError(
                    "expected carriers, functions, or predicates section",
                    head.span,
                )

        self._each_line(handler)
        return AlgebraBody(tuple(carriers), tuple(functions), tuple(predicates))

    # -- trace ----------------------------------------------------------

    def _parse_trace(self):
        components: list[ComponentDecl] = []
        steps: list[dict] = []
        section = [None]  # None | "components" | "step"

        def current_step():
            if not steps:
                raise LineError("`step` section required first", None)
            return steps[-1]

        def handler(cur: Cursor, text: str):
            head = cur.peek()
            if head.text == "components" and cur.peek(1) is None:
                section[0] = "components"
                return
            if head.text == "step" and cur.peek(1) is None:
                section[0] = "step"
                steps.append({"actives": [], "connects": [], "span": head.span})
                return
            if section[0] == "components":
                cid = cur.expect_ident("component id").text
                cur.expect(":")
                iface = cur.expect_ident("interface").text
                locals_: list = []
                if cur.at("with"):
                    cur.take()
                    while True:
                        port = cur.expect_ident("port").text
                        cur.expect("=")
                        value = _parse_primary(cur)
                        locals_.append((port, value))
                        if cur.at(","):
                            cur.take()
                            continue
                        break
                cur.expect_end()
                components.append(
                    ComponentDecl(cid, iface, tuple(locals_), span=head.span)
                )
                return
            if section[0] == "step":
                step = current_step()
                if head.text == "active":
                    cur.take()
                    cid = cur.expect_ident("component id").text
                    cur.expect_end()
                    step["actives"].append({"id": cid, "vals": [], "span": head.span})
                    return
                if head.text == "connect":
                    step["connects"].append(_parse_connect(cur))
                    return
                # port valuation line inside the latest `active` block
                if not step["actives"]:
                    raise LineError(
                        "port valuations must follow an `active` line", head.span
                    )
                port = cur.expect_ident("port").text
                cur.expect("=")
                value = _parse_primary(cur)
                cur.expect_end()
                step["actives"][-1]["vals"].append((port, value))
                return
            raise LineError("expected components or step section", head.span)

        self._each_line(handler)
        built_steps = tuple(
            StepDecl(
                actives=tuple(
                    ActiveDecl(a["id"], tuple(a["vals"]), span=a["span"])
                    for a in step["actives"]
                ),
                connects=tuple(step["connects"]),
                span=step["span"],
            )
            for step in steps
        )
        return TraceBody(tuple(components), built_steps)


def _close_interface(builder: dict) -> InterfaceDecl:
    return InterfaceDecl(
        name=builder["name"],
        local=tuple(builder["local"]),
        inputs=tuple(builder["inputs"]),
        outputs=tuple(builder["outputs"]),
        minmax=builder["minmax"],
        span=builder["span"],
    )


def parse_unit(text: str):
    """Parse one source unit; returns (SourceUnit | None, diagnostics)."""
    parser = _UnitParser(text)
    unit = parser.parse()
    diagnostics = sorted(
        parser.diagnostics,
        key=lambda d: (d.span.line if d.span else 0, d.span.column if d.span else 0),
    )
    return unit, diagnostics
