"""Recursive-descent parser for PerfC.

    program    := funcdef+
    funcdef    := type ident "(" params? ")" block
    type       := ("int" | "double") "*"? | "void"
    block      := "{" stmt* "}"
    stmt       := decl ";" | simple ";" | if | for | while | return ";"
                | block | expr ";" | "#perf" "iterations" "(" expr ")" loop
    decl       := type ident ("=" expr)?
    simple     := lvalue "=" expr | lvalue ("+="|"-="|"*="|"/="|"%=") expr
                | ("++"|"--") ident | ident ("++"|"--")
    if         := "if" "(" expr ")" stmt ("else" stmt)?
    for        := "for" "(" (decl | simple) ";" expr ";" simple ")" stmt
    while      := "while" "(" expr ")" stmt
    return     := "return" expr? ";"

Expressions use C-style precedence:
    || < && < (== !=) < (< <= > >=) < (+ -) < (* / %) < unary < postfix

The first error aborts with a FrontendError carrying line:column.
break/continue/goto are recognized and rejected by name. Address-of is
only accepted inside call argument lists (the communication builtins
validate placement later). Exactly one function must be named "main"
and all of its parameters must be ints.
"""

from __future__ import annotations

from .ast_nodes import (
    AddrOf, AssignStmt, Binary, Block, Call, CompoundAssign, DeclStmt, Expr,
    ExprStmt, FloatLit, For, FuncDef, Ident, If, IncrDecr, Index, IntLit,
    Malloc, Param, Program, Return, SizeofDeref, SizeofType, Stmt, TypeSpec,
    Unary, While,
)
from .diagnostics import Diagnostic, FrontendError, Loc
from .lexer import Token, tokenize

COMPOUND_OPS = {"+=": "+", "-=": "-", "*=": "*", "/=": "/", "%=": "%"}


def parse(source: str) -> Program:
    """Parse PerfC source text; raises FrontendError on the first problem."""
    program = _Parser(tokenize(source)).parse_program()
    _validate_main(program)
    return program


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token helpers ---------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def at_op(self, text: str) -> bool:
        return self.at("op", text)

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def accept_op(self, text: str) -> Token | None:
        if self.at_op(text):
            return self.advance()
        return None

    def expect(self, kind: str, text: str | None = None, what: str | None = None) -> Token:
        if self.at(kind, text):
            return self.advance()
        tok = self.peek()
        wanted = what or (text if text is not None else kind)
        got = tok.text if tok.kind != "eof" else "end of input"
        self.error(f"expected {wanted!r}, found {got!r}", tok.loc)

    def expect_op(self, text: str) -> Token:
        return self.expect("op", text)

    def error(self, message: str, loc: Loc):
        raise FrontendError(Diagnostic(loc, message))

    # -- top level ---------------------------------------------------------

    def parse_program(self) -> Program:
        functions = []
        while not self.at("eof"):
            functions.append(self.parse_funcdef())
        if not functions:
            self.error("empty program: at least a 'main' function is required",
                       self.peek().loc)
        return Program(functions)

    def parse_type(self, allow_void: bool) -> TypeSpec:
        tok = self.peek()
        if tok.kind not in ("int", "double", "void"):
            self.error(f"expected a type, found {tok.text!r}", tok.loc)
        self.advance()
        if tok.kind == "void":
            if not allow_void:
                self.error("'void' is only valid as a return type", tok.loc)
            if self.at_op("*"):
                self.error("pointers to void are not supported", self.peek().loc)
            return TypeSpec("void")
        pointer = self.accept_op("*") is not None
        return TypeSpec(tok.kind, pointer)

    def parse_funcdef(self) -> FuncDef:
        start = self.peek().loc
        ret_type = self.parse_type(allow_void=True)
        name = self.expect("ident", what="function name")
        self.expect_op("(")
        params: list[Param] = []
        if not self.at_op(")"):
            while True:
                ploc = self.peek().loc
                ptype = self.parse_type(allow_void=False)
                pname = self.expect("ident", what="parameter name")
                params.append(Param(ploc, ptype, pname.text))
                if not self.accept_op(","):
                    break
        self.expect_op(")")
        body = self.parse_block()
        return FuncDef(start, ret_type, name.text, params, body)

    # -- statements ------------------------------------------------------------

    def parse_block(self) -> Block:
        start = self.expect_op("{").loc
        stmts: list[Stmt] = []
        while not self.at_op("}"):
            if self.at("eof"):
                self.error("unterminated block: missing '}'", self.peek().loc)
            stmts.append(self.parse_stmt())
        self.expect_op("}")
        return Block(start, stmts)

    def parse_stmt(self) -> Stmt:
        tok = self.peek()
        if tok.kind in ("break", "continue", "goto"):
            self.error(f"unsupported construct: '{tok.kind}'", tok.loc)
        if tok.kind == "perf":
            return self.parse_perf_annotated_loop()
        if tok.kind in ("int", "double", "void"):
            stmt = self.parse_decl()
            self.expect_op(";")
            return stmt
        if tok.kind == "if":
            return self.parse_if()
        if tok.kind == "for":
            return self.parse_for()
        if tok.kind == "while":
            return self.parse_while()
        if tok.kind == "return":
            self.advance()
            expr = None if self.at_op(";") else self.parse_expr()
            self.expect_op(";")
            return Return(tok.loc, expr)
        if self.at_op("{"):
            return self.parse_block()
        stmt = self.parse_simple_or_expr_stmt()
        self.expect_op(";")
        return stmt

    def parse_perf_annotated_loop(self) -> Stmt:
        perf = self.advance()  # "#perf"
        kw = self.expect("ident", what="'iterations'")
        if kw.text != "iterations":
            self.error(f"unknown annotation '#perf {kw.text}'; "
                       "only 'iterations(expr)' is supported", kw.loc)
        self.expect_op("(")
        trip = self.parse_expr()
        self.expect_op(")")
        tok = self.peek()
        if tok.kind == "for":
            loop = self.parse_for()
        elif tok.kind == "while":
            loop = self.parse_while()
        else:
            self.error("'#perf iterations(...)' must be followed by a loop", perf.loc)
        loop.perf_trip = trip
        return loop

    def parse_decl(self) -> DeclStmt:
        start = self.peek().loc
        dtype = self.parse_type(allow_void=False)
        name = self.expect("ident", what="variable name")
        init = None
        if self.accept_op("="):
            init = self.parse_expr()
        return DeclStmt(start, dtype, name.text, init)

    def parse_if(self) -> If:
        start = self.advance().loc  # "if"
        self.expect_op("(")
        cond = self.parse_expr()
        self.expect_op(")")
        then = self.parse_stmt()
        els = None
        if self.peek().kind == "else":
            self.advance()
            els = self.parse_stmt()
        return If(start, cond, then, els)

    def parse_for(self) -> For:
        start = self.advance().loc  # "for"
        self.expect_op("(")
        if self.peek().kind in ("int", "double"):
            init = self.parse_decl()
        else:
            init = self.parse_simple_stmt()
        self.expect_op(";")
        cond = self.parse_expr()
        self.expect_op(";")
        step = self.parse_simple_stmt()
        self.expect_op(")")
        body = self.parse_stmt()
        return For(start, init, cond, step, body)

    def parse_while(self) -> While:
        start = self.advance().loc  # "while"
        self.expect_op("(")
        cond = self.parse_expr()
        self.expect_op(")")
        body = self.parse_stmt()
        return While(start, cond, body)

    def parse_simple_or_expr_stmt(self) -> Stmt:
        if self.at_op("++") or self.at_op("--"):
            return self.parse_simple_stmt()
        start = self.pos
        expr = self.parse_expr()
        if self.at_op("=") or self.peek().text in COMPOUND_OPS or \
                self.at_op("++") or self.at_op("--"):
            self.pos = start
            return self.parse_simple_stmt()
        return ExprStmt(expr.loc, expr)

    def parse_simple_stmt(self) -> Stmt:
        """Assignment, compound assignment, or ++/-- (pre or post)."""
        tok = self.peek()
        if self.at_op("++") or self.at_op("--"):
            op = self.advance().text
            name = self.expect("ident", what="variable name")
            return IncrDecr(tok.loc, Ident(name.loc, name.text), op, prefix=True)
        target = self.parse_postfix()
        if not isinstance(target, (Ident, Index)):
            self.error("invalid assignment target", target.loc)
        if self.at_op("++") or self.at_op("--"):
            if not isinstance(target, Ident):
                self.error("'++'/'--' require a plain variable", target.loc)
            op = self.advance().text
            return IncrDecr(tok.loc, target, op, prefix=False)
        if self.accept_op("="):
            return AssignStmt(tok.loc, target, self.parse_expr())
        op_tok = self.peek()
        if op_tok.text in COMPOUND_OPS:
            self.advance()
            return CompoundAssign(tok.loc, target, COMPOUND_OPS[op_tok.text],
                                  self.parse_expr())
        self.error("expected an assignment", op_tok.loc)

    # -- expressions --------------------------------------------------------------

    def parse_expr(self) -> Expr:
        return self.parse_or()

    def _parse_left_assoc(self, sub, ops: tuple[str, ...]) -> Expr:
        expr = sub()
        while self.peek().kind == "op" and self.peek().text in ops:
            op = self.advance()
            expr = Binary(expr.loc, op.text, expr, sub())
        return expr

    def parse_or(self) -> Expr:
        return self._parse_left_assoc(self.parse_and, ("||",))

    def parse_and(self) -> Expr:
        return self._parse_left_assoc(self.parse_equality, ("&&",))

    def parse_equality(self) -> Expr:
        return self._parse_left_assoc(self.parse_relational, ("==", "!="))

    def parse_relational(self) -> Expr:
        return self._parse_left_assoc(self.parse_additive, ("<", "<=", ">", ">="))

    def parse_additive(self) -> Expr:
        return self._parse_left_assoc(self.parse_multiplicative, ("+", "-"))

    def parse_multiplicative(self) -> Expr:
        return self._parse_left_assoc(self.parse_unary, ("*", "/", "%"))

    def parse_unary(self) -> Expr:
        tok = self.peek()
        if self.at_op("-") or self.at_op("!"):
            self.advance()
            return Unary(tok.loc, tok.text, self.parse_unary())
        if self.at_op("++") or self.at_op("--"):
            self.error(f"'{tok.text}' is a statement, not an expression", tok.loc)
        return self.parse_postfix()

    def parse_postfix(self) -> Expr:
        expr = self.parse_primary()
        while self.at_op("["):
            self.advance()
            index = self.parse_expr()
            self.expect_op("]")
            expr = Index(expr.loc, expr, index)
        return expr

    def parse_primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return IntLit(tok.loc, int(tok.text))
        if tok.kind == "float":
            self.advance()
            return FloatLit(tok.loc, float(tok.text))
        if tok.kind == "sizeof":
            return self.parse_sizeof()
        if tok.kind == "ident":
            if tok.text == "malloc" and self.peek(1).text == "(":
                self.advance()
                self.expect_op("(")
                size = self.parse_expr()
                self.expect_op(")")
                return Malloc(tok.loc, size)
            self.advance()
            if self.at_op("("):
                return self.parse_call(tok)
            return Ident(tok.loc, tok.text)
        if self.at_op("("):
            self.advance()
            expr = self.parse_expr()
            self.expect_op(")")
            return expr
        if self.at_op("&"):
            self.error("address-of is only allowed as a call argument "
                       "(communication builtins)", tok.loc)
        if tok.kind in ("break", "continue", "goto"):
            self.error(f"unsupported construct: '{tok.kind}'", tok.loc)
        got = tok.text if tok.kind != "eof" else "end of input"
        self.error(f"expected an expression, found {got!r}", tok.loc)

    def parse_sizeof(self) -> Expr:
        tok = self.advance()  # "sizeof"
        self.expect_op("(")
        if self.at_op("*"):
            self.advance()
            name = self.expect("ident", what="pointer variable")
            node: Expr = SizeofDeref(tok.loc, Ident(name.loc, name.text))
        elif self.peek().kind in ("int", "double"):
            node = SizeofType(tok.loc, TypeSpec(self.advance().kind))
        else:
            self.error("sizeof expects a type or '*pointer'", self.peek().loc)
        self.expect_op(")")
        return node

    def parse_call(self, name_tok: Token) -> Call:
        self.expect_op("(")
        args: list[Expr] = []
        if not self.at_op(")"):
            while True:
                if self.at_op("&"):
                    amp = self.advance()
                    target = self.expect("ident", what="variable after '&'")
                    args.append(AddrOf(amp.loc, Ident(target.loc, target.text)))
                else:
                    args.append(self.parse_expr())
                if not self.accept_op(","):
                    break
        self.expect_op(")")
        return Call(name_tok.loc, name_tok.text, args)


def _validate_main(program: Program) -> None:
    seen: dict[str, FuncDef] = {}
    for f in program.functions:
        if f.name in seen:
            raise FrontendError(Diagnostic(f.loc, f"duplicate function '{f.name}'"))
        seen[f.name] = f
    main = seen.get("main")
    if main is None:
        loc = program.functions[0].loc
        raise FrontendError(Diagnostic(loc, "program has no 'main' function"))
    for p in main.params:
        if p.type != TypeSpec("int"):
            raise FrontendError(Diagnostic(
                p.loc, f"parameter '{p.name}' of main must have type int "
                       "(input-size parameters)"))
