"""AST node definitions for PerfC.

Nodes are plain dataclasses with ``eq=False`` so each node hashes by
identity; analysis passes key side tables (resolution, trackedness,
loop annotations) directly on node objects. Every node carries the
source location of its first token.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .diagnostics import Loc


@dataclass(frozen=True)
class TypeSpec:
    base: str  # "int" | "double" | "void"
    pointer: bool = False

    def __str__(self) -> str:
        return f"{self.base} *" if self.pointer else self.base

    @property
    def elem_size(self) -> int:
        # sizeof(double) = 8, sizeof(int) = 4
        return 8 if self.base == "double" else 4


# -- expressions -----------------------------------------------------------


@dataclass(eq=False)
class Expr:
    loc: Loc


@dataclass(eq=False)
class IntLit(Expr):
    value: int


@dataclass(eq=False)
class FloatLit(Expr):
    value: float


@dataclass(eq=False)
class Ident(Expr):
    name: str


@dataclass(eq=False)
class Binary(Expr):
    op: str  # + - * / % < <= > >= == != && ||
    lhs: Expr
    rhs: Expr


@dataclass(eq=False)
class Unary(Expr):
    op: str  # - !
    operand: Expr


@dataclass(eq=False)
class Index(Expr):
    base: Expr
    index: Expr


@dataclass(eq=False)
class Call(Expr):
    name: str
    args: list[Expr]


@dataclass(eq=False)
class Malloc(Expr):
    size: Expr


@dataclass(eq=False)
class SizeofType(Expr):
    type: TypeSpec  # sizeof(int) / sizeof(double)


@dataclass(eq=False)
class SizeofDeref(Expr):
    pointer: Ident  # sizeof(*p): the element size of p's pointee


@dataclass(eq=False)
class AddrOf(Expr):
    target: Ident  # only valid as a communication-builtin argument


# -- statements ---------------------------------------------------------------


@dataclass(eq=False)
class Stmt:
    loc: Loc


@dataclass(eq=False)
class DeclStmt(Stmt):
    type: TypeSpec
    name: str
    init: Optional[Expr]


@dataclass(eq=False)
class AssignStmt(Stmt):
    target: Union[Ident, Index]
    expr: Expr


@dataclass(eq=False)
class CompoundAssign(Stmt):
    target: Union[Ident, Index]
    op: str  # + - * / %
    expr: Expr


@dataclass(eq=False)
class IncrDecr(Stmt):
    target: Ident
    op: str  # "++" | "--"
    prefix: bool


@dataclass(eq=False)
class If(Stmt):
    cond: Expr
    then: Stmt
    els: Optional[Stmt]


@dataclass(eq=False)
class For(Stmt):
    init: Stmt  # DeclStmt | AssignStmt | CompoundAssign | IncrDecr
    cond: Expr
    step: Stmt  # AssignStmt | CompoundAssign | IncrDecr
    body: Stmt
    perf_trip: Optional[Expr] = None  # explicit "#perf iterations(expr)"


@dataclass(eq=False)
class While(Stmt):
    cond: Expr
    body: Stmt
    perf_trip: Optional[Expr] = None


@dataclass(eq=False)
class Return(Stmt):
    expr: Optional[Expr]


@dataclass(eq=False)
class Block(Stmt):
    stmts: list[Stmt] = field(default_factory=list)


@dataclass(eq=False)
class ExprStmt(Stmt):
    expr: Expr


# -- top level -------------------------------------------------------------------


@dataclass(eq=False)
class Param:
    loc: Loc
    type: TypeSpec
    name: str


@dataclass(eq=False)
class FuncDef:
    loc: Loc
    ret_type: TypeSpec
    name: str
    params: list[Param]
    body: Block


@dataclass(eq=False)
class Program:
    functions: list[FuncDef]

    def function(self, name: str) -> FuncDef:
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(name)
