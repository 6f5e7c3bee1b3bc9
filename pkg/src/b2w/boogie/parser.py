"""Recursive-descent parser producing :mod:`b2w.boogie.ast` trees.

Errors follow a first-error-plus-recovery policy: after a syntax error the
parser skips to the next top-level keyword and keeps going, so one run reports
one diagnostic per broken declaration.
"""

from __future__ import annotations

from ..diagnostics import BoogieSyntaxError, Diagnostic, ERROR, Span
from . import ast as A
from .lexer import Token, tokenize

TOP_LEVEL = ("type", "const", "var", "function", "axiom", "procedure", "implementation")

REL_OPS = ("==", "!=", "<", "<=", ">", ">=", "<:")


class _Abort(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


class Parser:
    def __init__(self, tokens: list[Token], origin: str):
        self.toks = tokens
        self.pos = 0
        self.origin = origin
        self.notes: list[Diagnostic] = []

    # ------------------------------------------------------------ helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text in texts

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def accept(self, text: str) -> Token | None:
        if self.at(text):
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        if self.at(text):
            return self.advance()
        self.fail(f"expected '{text}' but found {self.describe(self.tok)}")

    def describe(self, t: Token) -> str:
        return "end of file" if t.kind == "eof" else repr(t.text)

    def fail(self, message: str, span: Span | None = None):
        raise _Abort(Diagnostic(ERROR, message, span or self.tok.span, "syntax"))

    def ident(self) -> Token:
        if self.tok.kind == "ident":
            return self.advance()
        self.fail(f"expected identifier but found {self.describe(self.tok)}")

    def span_from(self, start: Token) -> Span:
        prev = self.toks[self.pos - 1] if self.pos > 0 else start
        return start.span.to(prev.span)

    # ------------------------------------------------------------ program

    def program(self) -> A.Program:
        decls = []
        errors = []
        start = self.tok
        while self.tok.kind != "eof":
            try:
                decls.extend(self.decl())
            except _Abort as a:
                errors.append(a.diag)
                self.recover()
        if errors:
            raise BoogieSyntaxError(errors[0].message, errors[0].span, diagnostics=errors)
        return A.Program(tuple(decls), span=start.span.to(self.tok.span))

    def recover(self) -> None:
        self.advance()
        while self.tok.kind != "eof" and not (self.tok.kind == "kw" and self.tok.text in TOP_LEVEL):
            self.advance()

    def attributes(self) -> tuple:
        attrs = []
        while self.at("{") and self.peek().is_(":"):
            attrs.append(self.attribute())
        return tuple(attrs)

    def attribute(self) -> A.Attribute:
        start = self.expect("{")
        self.expect(":")
        name = self.ident().text
        args = []
        if not self.at("}"):
            args.append(self.attr_arg())
            while self.accept(","):
                args.append(self.attr_arg())
        self.expect("}")
        return A.Attribute(name, tuple(args), span=self.span_from(start))

    def attr_arg(self):
        if self.tok.kind == "string":
            t = self.advance()
            return A.StrLit(t.text[1:-1], span=t.span)
        return self.expr()

    def decl(self) -> list:
        t = self.tok
        if t.kind != "kw" or t.text not in TOP_LEVEL:
            self.fail(f"unknown top-level declaration starting with {self.describe(t)}")
        return getattr(self, "decl_" + t.text)()

    def decl_type(self) -> list:
        self.expect("type")
        attrs = self.attributes()
        decls = []
        while True:
            dstart = self.tok
            finite = False
            if self.tok.kind == "kw" and self.tok.text == "finite":
                self.advance()
                finite = True
            name = self.ident().text
            params = []
            while self.tok.kind == "ident":
                params.append(self.advance().text)
            syn = None
            if self.accept("="):
                syn = self.type_()
            decls.append(A.TypeDecl(name, tuple(params), syn, finite, attrs, span=self.span_from(dstart)))
            if not self.accept(","):
                break
        self.expect(";")
        return decls

    def ids_type(self) -> tuple[list[Token], A.BoogieType]:
        names = [self.ident()]
        while self.accept(","):
            names.append(self.ident())
        self.expect(":")
        return names, self.type_()

    def decl_const(self) -> list:
        start = self.expect("const")
        attrs = self.attributes()
        unique = bool(self.accept("unique"))
        names, ty = self.ids_type()
        parents = None
        complete = False
        legacy = False
        if self.at("extends", "<:"):
            legacy = self.advance().text == "<:"
            plist = []
            if self.tok.kind == "ident" or self.at("unique"):
                plist.append(self.parent())
                while self.accept(","):
                    plist.append(self.parent())
            parents = tuple(plist)
            if self.accept("complete"):
                complete = True
        self.expect(";")
        if legacy:
            self.notes.append(
                Diagnostic("note", "legacy '<:' order syntax accepted as 'extends'", start.span, "legacy-syntax")
            )
        return [
            A.ConstDecl(
                tuple(n.text for n in names), ty, unique, parents, complete, attrs,
                legacy_order=legacy, span=self.span_from(start),
            )
        ]

    def parent(self) -> A.Parent:
        start = self.tok
        uniq = bool(self.accept("unique"))
        name = self.ident().text
        return A.Parent(name, uniq, span=self.span_from(start))

    def decl_var(self) -> list:
        start = self.expect("var")
        attrs = self.attributes()
        bindings = self.ids_type_wheres()
        self.expect(";")
        return [A.VarDecl(tuple(bindings), attrs, span=self.span_from(start))]

    def ids_type_wheres(self) -> list[A.Binding]:
        out = []
        while True:
            group_start = self.tok
            names, ty = self.ids_type()
            where = None
            if self.accept("where"):
                where = self.expr()
            for n in names:
                out.append(A.Binding(n.text, ty, where, span=n.span.to(self.toks[self.pos - 1].span)))
            if not self.accept(","):
                return out

    def tparams(self) -> tuple:
        if not self.accept("<"):
            return ()
        names = [self.ident().text]
        while self.accept(","):
            names.append(self.ident().text)
        self.expect(">")
        return tuple(names)

    def decl_function(self) -> list:
        start = self.expect("function")
        attrs = self.attributes()
        name = self.ident().text
        tps = self.tparams()
        self.expect("(")
        params = []
        if not self.at(")"):
            params.extend(self.fargs())
            while self.accept(","):
                params.extend(self.fargs())
        self.expect(")")
        if self.accept("returns"):
            self.expect("(")
            res = self.fargs()
            if len(res) != 1:
                self.fail("function must return exactly one value")
            result = res[0]
            self.expect(")")
        else:
            self.expect(":")
            rt = self.tok
            result = A.Binding(None, self.type_(), span=self.span_from(rt))
        body = None
        if self.accept("{"):
            body = self.expr()
            self.expect("}")
        else:
            self.expect(";")
        return [A.FunctionDecl(name, tps, tuple(params), result, body, attrs, span=self.span_from(start))]

    def fargs(self) -> list[A.Binding]:
        # `x, y: T` or `T` (anonymous)
        start = self.tok
        if self.tok.kind == "ident" and (self.peek().is_(":") or self.peek().is_(",")):
            save = self.pos
            names = [self.ident()]
            while self.accept(","):
                if self.tok.kind != "ident":
                    break
                names.append(self.ident())
            if self.accept(":"):
                ty = self.type_()
                return [A.Binding(n.text, ty, span=n.span.to(self.toks[self.pos - 1].span)) for n in names]
            self.pos = save
        ty = self.type_()
        return [A.Binding(None, ty, span=self.span_from(start))]

    def decl_axiom(self) -> list:
        start = self.expect("axiom")
        attrs = self.attributes()
        e = self.expr()
        self.expect(";")
        return [A.AxiomDecl(e, attrs, span=self.span_from(start))]

    def signature(self):
        name = self.ident().text
        tps = self.tparams()
        self.expect("(")
        ins = [] if self.at(")") else self.ids_type_wheres()
        self.expect(")")
        outs = []
        if self.accept("returns"):
            self.expect("(")
            outs = [] if self.at(")") else self.ids_type_wheres()
            self.expect(")")
        return name, tps, tuple(ins), tuple(outs)

    def decl_procedure(self) -> list:
        start = self.expect("procedure")
        attrs = self.attributes()
        name, tps, ins, outs = self.signature()
        body = None
        specs = []
        if self.accept(";"):
            specs = self.specs()
        else:
            specs = self.specs()
            if not self.at("{"):
                self.fail(f"expected ';' or procedure body but found {self.describe(self.tok)}")
            body = self.body()
        return [A.ProcedureDecl(name, tps, ins, outs, tuple(specs), body, attrs, span=self.span_from(start))]

    def specs(self) -> list:
        out = []
        while True:
            start = self.tok
            free = bool(self.accept("free"))
            if self.accept("requires"):
                attrs = self.attributes()
                e = self.expr()
                self.expect(";")
                out.append(A.Requires(free, e, attrs, span=self.span_from(start)))
            elif self.accept("ensures"):
                attrs = self.attributes()
                e = self.expr()
                self.expect(";")
                out.append(A.Ensures(free, e, attrs, span=self.span_from(start)))
            elif not free and self.accept("modifies"):
                names = []
                if self.tok.kind == "ident":
                    t = self.ident()
                    names.append(A.Ident(t.text, span=t.span))
                    while self.accept(","):
                        t = self.ident()
                        names.append(A.Ident(t.text, span=t.span))
                self.expect(";")
                out.append(A.Modifies(tuple(names), span=self.span_from(start)))
            elif free:
                self.fail("expected 'requires' or 'ensures' after 'free'")
            else:
                return out

    def decl_implementation(self) -> list:
        start = self.expect("implementation")
        attrs = self.attributes()
        name, tps, ins, outs = self.signature()
        body = self.body()
        return [A.Implementation(name, tps, ins, outs, body, attrs, span=self.span_from(start))]

    def body(self) -> A.Body:
        start = self.expect("{")
        locals_ = []
        while self.at("var"):
            self.advance()
            self.attributes()
            locals_.extend(self.ids_type_wheres())
            self.expect(";")
        stmts = self.stmt_list()
        self.expect("}")
        return A.Body(tuple(locals_), tuple(stmts), span=self.span_from(start))

    # ------------------------------------------------------------ types

    def type_(self) -> A.BoogieType:
        start = self.tok
        if self.at("<") or self.at("["):
            return self.map_type()
        if self.tok.kind == "ident":
            name = self.advance().text
            args = []
            while True:
                if self.tok.kind == "ident":
                    t = self.advance()
                    args.append(A.CtorType(t.text, (), span=t.span))
                elif self.at("int", "real", "bool", "(") or self.tok.kind == "bvtype":
                    args.append(self.type_atom())
                elif self.at("[", "<") and args is not None and self._map_follows():
                    args.append(self.map_type())
                    break
                else:
                    break
            return A.CtorType(name, tuple(args), span=self.span_from(start))
        return self.type_atom()

    def _map_follows(self) -> bool:
        # `C [int]int` as a trailing ctor argument; `<` only when followed by ident `>`/`,`
        if self.at("["):
            return True
        return self.peek().kind == "ident" and (self.peek(2).is_(">") or self.peek(2).is_(","))

    def type_atom(self) -> A.BoogieType:
        t = self.tok
        if self.at("int", "real", "bool"):
            self.advance()
            return A.PrimType(t.text, span=t.span)
        if t.kind == "bvtype":
            self.advance()
            return A.BvType(int(t.text[2:]), span=t.span)
        if self.accept("("):
            ty = self.type_()
            self.expect(")")
            return ty
        if t.kind == "ident":
            self.advance()
            return A.CtorType(t.text, (), span=t.span)
        if self.at("[", "<"):
            return self.map_type()
        self.fail(f"expected type but found {self.describe(t)}")

    def map_type(self) -> A.MapType:
        start = self.tok
        tps = self.tparams()
        self.expect("[")
        dom = [self.type_()]
        while self.accept(","):
            dom.append(self.type_())
        self.expect("]")
        cod = self.type_()
        return A.MapType(tps, tuple(dom), cod, span=self.span_from(start))

    # ------------------------------------------------------------ statements

    def stmt_list(self) -> list:
        out = []
        while not self.at("}") and self.tok.kind != "eof":
            out.extend(self.stmt())
        return out

    def block(self) -> tuple:
        self.expect("{")
        stmts = self.stmt_list()
        self.expect("}")
        return tuple(stmts)

    def stmt(self) -> list:
        t = self.tok
        if t.kind == "ident" and self.peek().is_(":"):
            self.advance()
            self.advance()
            return [A.Label(t.text, span=self.span_from(t))]
        if t.kind == "kw":
            k = t.text
            if k in ("assert", "assume"):
                self.advance()
                attrs = self.attributes()
                e = self.expr()
                self.expect(";")
                cls = A.Assert if k == "assert" else A.Assume
                return [cls(e, attrs, span=self.span_from(t))]
            if k == "havoc":
                self.advance()
                vs = [self.ident_expr()]
                while self.accept(","):
                    vs.append(self.ident_expr())
                self.expect(";")
                return [A.Havoc(tuple(vs), span=self.span_from(t))]
            if k in ("call", "free"):
                return [self.call_stmt()]
            if k == "if":
                return [self.if_stmt()]
            if k == "while":
                return [self.while_stmt()]
            if k == "break":
                self.advance()
                label = self.ident().text if self.tok.kind == "ident" else None
                self.expect(";")
                return [A.Break(label, span=self.span_from(t))]
            if k == "return":
                self.advance()
                self.expect(";")
                return [A.Return(span=self.span_from(t))]
            if k == "goto":
                self.advance()
                labels = [self.ident().text]
                while self.accept(","):
                    labels.append(self.ident().text)
                self.expect(";")
                return [A.Goto(tuple(labels), span=self.span_from(t))]
        if t.kind == "ident":
            return [self.assign_stmt()]
        self.fail(f"expected statement but found {self.describe(t)}")

    def ident_expr(self) -> A.Ident:
        t = self.ident()
        return A.Ident(t.text, span=t.span)

    def lhs(self) -> A.Expr:
        start = self.tok
        e: A.Expr = self.ident_expr()
        while self.accept("["):
            idx = [self.expr()]
            while self.accept(","):
                idx.append(self.expr())
            self.expect("]")
            e = A.MapSelect(e, tuple(idx), span=self.span_from(start))
        return e

    def assign_stmt(self) -> A.Assign:
        start = self.tok
        lhs = [self.lhs()]
        while self.accept(","):
            lhs.append(self.lhs())
        self.expect(":=")
        rhs = [self.expr()]
        while self.accept(","):
            rhs.append(self.expr())
        self.expect(";")
        if len(lhs) != len(rhs):
            self.fail(f"assignment has {len(lhs)} targets but {len(rhs)} values", self.span_from(start))
        return A.Assign(tuple(lhs), tuple(rhs), span=self.span_from(start))

    def call_stmt(self) -> A.Stmt:
        start = self.tok
        free = bool(self.accept("free"))
        self.expect("call")
        attrs = self.attributes()
        if self.accept("forall"):
            name = self.ident().text
            self.expect("(")
            args = []
            if not self.at(")"):
                args.append(self.call_forall_arg())
                while self.accept(","):
                    args.append(self.call_forall_arg())
            self.expect(")")
            self.expect(";")
            return A.CallForall(name, tuple(args), attrs, span=self.span_from(start))
        outs = []
        if self.tok.kind == "ident" and (self.peek().is_(",") or self.peek().is_(":=")):
            outs.append(self.ident_expr())
            while self.accept(","):
                outs.append(self.ident_expr())
            self.expect(":=")
        name = self.ident().text
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.expr())
            while self.accept(","):
                args.append(self.expr())
        self.expect(")")
        self.expect(";")
        return A.Call(tuple(outs), name, tuple(args), attrs, free, span=self.span_from(start))

    def call_forall_arg(self):
        if self.at("*"):
            self.advance()
            return None
        return self.expr()

    def guard(self) -> A.Expr:
        self.expect("(")
        if self.at("*") and self.peek().is_(")"):
            t = self.advance()
            g = A.Star(span=t.span)
        else:
            g = self.expr()
        self.expect(")")
        return g

    def if_stmt(self) -> A.If:
        start = self.expect("if")
        g = self.guard()
        then = self.block()
        els = None
        if self.accept("else"):
            if self.at("if"):
                els = (self.if_stmt(),)
            else:
                els = self.block()
        return A.If(g, then, els, span=self.span_from(start))

    def while_stmt(self) -> A.While:
        start = self.expect("while")
        g = self.guard()
        invs = []
        while self.at("free", "invariant"):
            istart = self.tok
            free = bool(self.accept("free"))
            self.expect("invariant")
            attrs = self.attributes()
            e = self.expr()
            self.expect(";")
            invs.append(A.Invariant(free, e, attrs, span=self.span_from(istart)))
        body = self.block()
        return A.While(g, tuple(invs), body, span=self.span_from(start))

    # ------------------------------------------------------------ expressions

    def expr(self) -> A.Expr:
        start = self.tok
        left = self.implies()
        if self.at("<==>"):
            self.advance()
            right = self.expr()
            return A.Binary("<==>", left, right, span=self.span_from(start))
        return left

    def implies(self) -> A.Expr:
        start = self.tok
        left = self.logical()
        if self.at("==>"):
            self.advance()
            right = self.implies()
            return A.Binary("==>", left, right, span=self.span_from(start))
        while self.at("<=="):
            self.advance()
            right = self.logical()
            left = A.Binary("<==", left, right, span=self.span_from(start))
        return left

    def logical(self) -> A.Expr:
        start = self.tok
        left = self.relation()
        if self.at("&&", "||"):
            op = self.tok.text
            while self.at(op):
                self.advance()
                right = self.relation()
                left = A.Binary(op, left, right, span=self.span_from(start))
            if self.at("&&", "||"):
                self.fail("mixing '&&' and '||' requires parentheses")
        return left

    def relation(self) -> A.Expr:
        start = self.tok
        first = self.concat()
        ops, operands = [], [first]
        while self.at(*REL_OPS):
            ops.append(self.advance().text)
            operands.append(self.concat())
        if not ops:
            return first
        if len(ops) == 1:
            return A.Binary(ops[0], operands[0], operands[1], span=self.span_from(start))
        return A.Chain(tuple(ops), tuple(operands), span=self.span_from(start))

    def concat(self) -> A.Expr:
        start = self.tok
        left = self.additive()
        while self.at("++"):
            self.advance()
            right = self.additive()
            left = A.Binary("++", left, right, span=self.span_from(start))
        return left

    def additive(self) -> A.Expr:
        start = self.tok
        left = self.multiplicative()
        while self.at("+", "-"):
            op = self.advance().text
            right = self.multiplicative()
            left = A.Binary(op, left, right, span=self.span_from(start))
        return left

    def multiplicative(self) -> A.Expr:
        start = self.tok
        left = self.power()
        while self.at("*", "/", "div", "mod"):
            op = self.advance().text
            right = self.power()
            left = A.Binary(op, left, right, span=self.span_from(start))
        return left

    def power(self) -> A.Expr:
        start = self.tok
        left = self.unary()
        if self.at("**"):
            self.advance()
            right = self.power()
            return A.Binary("**", left, right, span=self.span_from(start))
        return left

    def unary(self) -> A.Expr:
        start = self.tok
        if self.at("!", "-"):
            op = self.advance().text
            operand = self.unary()
            return A.Unary(op, operand, span=self.span_from(start))
        return self.coercion()

    def coercion(self) -> A.Expr:
        start = self.tok
        e = self.postfix()
        while self.at(":") and not self.peek().is_(":"):
            self.advance()
            ty = self.type_()
            e = A.Coercion(e, ty, span=self.span_from(start))
        return e

    def postfix(self) -> A.Expr:
        start = self.tok
        e = self.atom()
        while self.at("["):
            self.advance()
            if self.tok.kind == "int" and self.peek().is_(":") and self.peek(2).kind == "int":
                hi = int(self.advance().text)
                self.advance()
                lo = int(self.advance().text)
                self.expect("]")
                e = A.BvExtract(e, hi, lo, span=self.span_from(start))
                continue
            idx = [self.expr()]
            while self.accept(","):
                idx.append(self.expr())
            if self.accept(":="):
                val = self.expr()
                self.expect("]")
                e = A.MapUpdate(e, tuple(idx), val, span=self.span_from(start))
            else:
                self.expect("]")
                e = A.MapSelect(e, tuple(idx), span=self.span_from(start))
        return e

    def atom(self) -> A.Expr:
        t = self.tok
        if t.kind == "int":
            self.advance()
            return A.IntLit(int(t.text), span=t.span)
        if t.kind == "dec":
            self.advance()
            return A.RealLit(t.text, span=t.span)
        if t.kind == "bv":
            self.advance()
            v, w = t.text.split("bv")
            return A.BvLit(int(v), int(w), span=t.span)
        if self.at("true", "false"):
            self.advance()
            return A.BoolLit(t.text == "true", span=t.span)
        if self.at("old"):
            self.advance()
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return A.Old(e, span=self.span_from(t))
        if self.at("int", "real") and self.peek().is_("("):
            self.advance()
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return A.Cast(t.text, e, span=self.span_from(t))
        if self.at("if"):
            self.advance()
            c = self.expr()
            self.expect("then")
            a = self.expr()
            self.expect("else")
            b = self.expr()
            return A.IfThenElse(c, a, b, span=self.span_from(t))
        if t.kind == "ident":
            self.advance()
            if self.accept("("):
                args = []
                if not self.at(")"):
                    args.append(self.expr())
                    while self.accept(","):
                        args.append(self.expr())
                self.expect(")")
                return A.FuncApp(t.text, tuple(args), span=self.span_from(t))
            return A.Ident(t.text, span=t.span)
        if self.at("("):
            self.advance()
            if self.at("forall", "exists", "lambda"):
                e = self.binder(t)
            else:
                e = self.expr()
            self.expect(")")
            if isinstance(e, (A.Quantifier, A.Lambda)):
                e = A.replace(e, span=self.span_from(t))
            return e
        self.fail(f"expected expression but found {self.describe(t)}")

    def binder(self, open_tok: Token) -> A.Expr:
        kind = self.advance().text
        tps = self.tparams()
        bound = []
        names, ty = self.ids_type()
        bound.extend(A.Binding(n.text, ty, span=n.span.to(self.toks[self.pos - 1].span)) for n in names)
        while self.accept(","):
            names, ty = self.ids_type()
            bound.extend(A.Binding(n.text, ty, span=n.span.to(self.toks[self.pos - 1].span)) for n in names)
        self.expect("::")
        triggers, attrs = [], []
        while self.at("{"):
            if self.peek().is_(":"):
                attrs.append(self.attribute())
            else:
                start = self.advance()
                exprs = [self.expr()]
                while self.accept(","):
                    exprs.append(self.expr())
                self.expect("}")
                triggers.append(A.Trigger(tuple(exprs), span=self.span_from(start)))
        body = self.expr()
        if kind == "lambda":
            if triggers:
                self.fail("lambda expressions cannot carry triggers")
            return A.Lambda(tps, tuple(bound), tuple(attrs), body)
        return A.Quantifier(kind, tps, tuple(bound), tuple(triggers), tuple(attrs), body)


def parse_boogie(source: str, origin: str = "<input>") -> A.Program:
    """Parse Boogie ``source``; raises :class:`BoogieSyntaxError` with diagnostics."""
    prog, _ = parse_boogie_with_notes(source, origin)
    return prog


def parse_boogie_with_notes(source: str, origin: str = "<input>"):
    try:
        tokens = tokenize(source, origin)
        p = Parser(tokens, origin)
        return p.program(), p.notes
    except RecursionError:
        sp = Span(origin, 1, 1, 1, 1)
        raise BoogieSyntaxError("input nested too deeply", sp) from None


def parse_expr(source: str, origin: str = "<expr>") -> A.Expr:
    p = Parser(tokenize(source, origin), origin)
    try:
        e = p.expr()
        if p.tok.kind != "eof":
            p.fail(f"unexpected {p.describe(p.tok)} after expression")
    except _Abort as a:
        raise BoogieSyntaxError(a.diag.message, a.diag.span) from None
    return e
