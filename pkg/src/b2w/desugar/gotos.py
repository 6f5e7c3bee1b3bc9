"""Recovering structured control flow from labels and gotos.

A body is cut into blocks at every label. Each block records its statements
and its successor labels (``None`` for a block that leaves the procedure).
Three rewrites are applied until none fires:

Sequencing
    ``N`` whose only successor is ``M``, where ``N`` is ``M``'s only
    predecessor, absorbs ``M``.
Choosing
    ``N`` whose successors are all terminal blocks reached only from ``N``
    absorbs them as a nest of ``if (*)``.
Looping
    a head holding only assertions and assumptions, a body block that starts
    with ``assume b`` and jumps back to the head, and an exit block starting
    with ``assume !b`` become a ``while`` loop; the head's assertions turn into
    invariants and its assumptions into free invariants.

Gotos that survive are replaced by ``assert false``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..boogie import ast as A
from ..diagnostics import ResidualGoto
from .common import DesugarConfig

_ENTRY = "$entry"


@dataclass
class Block:
    label: str
    stmts: list
    succs: Optional[list]  # None: leaves the procedure
    span: object = None
    goto_span: object = None


def _has_goto(stmts) -> bool:
    return any(isinstance(n, A.Goto) for s in stmts for n in A.walk(s))


def partition(stmts) -> list[Block]:
    """Cut a statement list into labelled blocks; fallthrough becomes an explicit edge."""
    blocks: list[Block] = []
    cur = Block(_ENTRY, [], None)
    closed = False
    for s in stmts:
        if isinstance(s, A.Label):
            if not closed:
                cur.succs = [s.name]
            blocks.append(cur)
            cur = Block(s.name, [], None, span=s.span)
            closed = False
            continue
        if closed:
            continue  # dead code after a jump
        if isinstance(s, A.Goto):
            cur.succs = list(dict.fromkeys(s.labels))
            cur.goto_span = s.span
            closed = True
        elif isinstance(s, A.Return):
            cur.stmts.append(s)
            cur.succs = None
            closed = True
        else:
            cur.stmts.append(s)
    blocks.append(cur)
    return blocks


def _prune(blocks: list[Block]) -> list[Block]:
    by = {b.label: b for b in blocks}
    seen, todo = set(), [blocks[0].label]
    while todo:
        l = todo.pop()
        if l in seen or l not in by:
            continue
        seen.add(l)
        todo.extend(by[l].succs or [])
    return [b for b in blocks if b.label in seen]


def _preds(blocks: list[Block]) -> dict:
    out = {b.label: [] for b in blocks}
    for b in blocks:
        for s in b.succs or []:
            if s in out:
                out[s].append(b.label)
    return out


def _negates(a: A.Expr, b: A.Expr) -> bool:
    return (isinstance(b, A.Unary) and b.op == "!" and b.operand == a) or (
        isinstance(a, A.Unary) and a.op == "!" and a.operand == b
    )


def _seq(blocks, by, preds) -> bool:
    for n in blocks:
        if n.succs is None or len(n.succs) != 1:
            continue
        m = by.get(n.succs[0])
        if m is None or m is n or m.label == _ENTRY or preds[m.label] != [n.label]:
            continue
        if m.succs and n.label in m.succs:
            continue
        n.stmts.extend(m.stmts)
        n.succs = m.succs
        n.goto_span = m.goto_span
        blocks.remove(m)
        return True
    return False


def _choose(blocks, by, preds) -> bool:
    for n in blocks:
        if not n.succs or len(n.succs) < 2:
            continue
        targets = [by.get(l) for l in n.succs]
        if any(
            t is None or t is n or t.label == _ENTRY or t.succs is not None or preds[t.label] != [n.label]
            for t in targets
        ):
            continue
        nest = tuple(targets[-1].stmts)
        for t in reversed(targets[:-1]):
            nest = (A.If(A.Star(), tuple(t.stmts), nest, span=t.span),)
        n.stmts.extend(nest)
        n.succs = None
        for t in targets:
            blocks.remove(t)
        return True
    return False


def _loop(blocks, by, preds) -> bool:
    for h in blocks:
        if not h.succs or len(h.succs) != 2:
            continue
        if not all(isinstance(s, (A.Assert, A.Assume)) for s in h.stmts):
            continue
        cand = [by.get(l) for l in h.succs]
        if any(c is None or c is h or c.label == _ENTRY for c in cand):
            continue
        for body, end in (cand, cand[::-1]):
            if body.succs != [h.label] or preds[body.label] != [h.label]:
                continue
            invs = tuple(A.Invariant(isinstance(s, A.Assume), s.expr, s.attrs, span=s.span) for s in h.stmts)
            bstmts, estmts = list(body.stmts), list(end.stmts)
            exclusive = preds[end.label] == [h.label]
            guard: A.Expr = A.Star()
            if (
                bstmts and estmts
                and isinstance(bstmts[0], A.Assume) and isinstance(estmts[0], A.Assume)
                and not bstmts[0].attrs and not estmts[0].attrs
                and _negates(bstmts[0].expr, estmts[0].expr)
            ):
                guard = bstmts[0].expr
                bstmts = bstmts[1:]
                if exclusive:
                    estmts = estmts[1:]
            loop = A.While(guard, invs, tuple(bstmts), span=h.span)
            blocks.remove(body)
            if exclusive:
                h.stmts = [loop] + estmts
                h.succs = end.succs
                h.goto_span = end.goto_span
                blocks.remove(end)
            else:
                h.stmts = [loop]
                h.succs = [end.label]
            return True
    return False


def structure(stmts) -> tuple[list[A.Stmt], list]:
    """Structure one statement list; returns the new list and spans of residual gotos."""
    blocks = _prune(partition(stmts))
    while True:
        by = {b.label: b for b in blocks}
        preds = _preds(blocks)
        if not (_seq(blocks, by, preds) or _choose(blocks, by, preds) or _loop(blocks, by, preds)):
            break
    residual: list = []
    out: list[A.Stmt] = []
    many = len(blocks) > 1
    for b in blocks:
        out.extend(b.stmts)
        if b.succs is not None:
            residual.append(b.goto_span or b.span)
            out.append(A.Assert(A.BoolLit(False), span=b.goto_span or b.span))
        elif many and not (b.stmts and isinstance(b.stmts[-1], A.Return)):
            out.append(A.Return(span=b.span))
    # gotos and labels nested inside structured statements cannot be structured
    def scrub(s):
        if isinstance(s, A.Goto):
            residual.append(s.span)
            return A.Assert(A.BoolLit(False), span=s.span)
        if isinstance(s, (A.If, A.While)):
            return A.map_children(s, scrub)
        return s

    final = []
    for s in out:
        if isinstance(s, A.Label):
            continue
        s = scrub(s)
        if isinstance(s, (A.If, A.While)):
            s = _drop_labels(s)
        final.append(s)
    return final, residual


def _drop_labels(s):
    if isinstance(s, A.If):
        return A.replace(
            s,
            then=tuple(_drop_labels(x) for x in s.then if not isinstance(x, A.Label)),
            else_=None if s.else_ is None else tuple(_drop_labels(x) for x in s.else_ if not isinstance(x, A.Label)),
        )
    if isinstance(s, A.While):
        return A.replace(s, body=tuple(_drop_labels(x) for x in s.body if not isinstance(x, A.Label)))
    return s


def structure_gotos(p: A.Program, cfg: DesugarConfig) -> A.Program:
    def body_of(b: A.Body, owner: str) -> A.Body:
        if not _has_goto(b.stmts):
            return b
        stmts, residual = structure(b.stmts)
        for sp in residual:
            msg = f"goto in '{owner}' could not be structured; replaced by 'assert false'"
            if cfg.goto_mode == "error":
                raise ResidualGoto(f"goto in '{owner}' could not be structured", sp)
            if cfg.goto_mode == "structure":
                cfg.sink.warn(msg, sp, code="residual-goto")
            else:
                cfg.fallbacks.append((msg, sp))
        return A.replace(b, stmts=tuple(stmts))

    out = []
    for d in p.decls:
        if isinstance(d, (A.ProcedureDecl, A.Implementation)) and d.body is not None:
            d = A.replace(d, body=body_of(d.body, d.name))
        out.append(d)
    return A.replace(p, decls=tuple(out))
