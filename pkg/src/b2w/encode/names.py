"""Injective renaming of Boogie identifiers into legal, unshadowed WhyML names."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

WHY_KEYWORDS = frozenset("""
    abstract absurd alias any as assert assume at axiom begin by check clone coinductive
    constant diverges do done downto else end ensures epsilon exception exists export
    false for forall fun function ghost goal if import in inductive invariant label lemma
    let loop match meta model module mutable not old private predicate prop raise raises
    reads rec requires result returns scope so then theory to true try type use val
    variant while with writes ref
""".split())

BUILTIN_VALUES = frozenset({"get", "set", "div", "mod", "pow", "from_int", "floor", "contents", "abs", "const"})
PRELUDE_VALUES = frozenset({"havoc", "yes"})
BUILTIN_TYPES = frozenset({"int", "real", "bool", "map", "ref", "unit", "tuple0"})

_ILLEGAL = re.compile(r"[^A-Za-z0-9_']")


def sanitize_value(name: str) -> str:
    """Legal lowercase-initial identifier derived from ``name``."""
    s = _ILLEGAL.sub("_", name)
    if not s or not s[0].isalpha():
        s = "v" + s
    return s[0].lower() + s[1:]


def sanitize_module(stem: str) -> str:
    s = _ILLEGAL.sub("_", stem)
    if not s or not s[0].isalpha():
        s = "M" + s
    return s[0].upper() + s[1:]


class Namespace:
    """Allocates distinct names within one flat namespace."""

    def __init__(self, reserved=()):
        self.taken: set[str] = set(reserved)

    def allocate(self, base: str, avoid=()) -> str:
        name, k = base, 0
        while name in self.taken or name in avoid or name in WHY_KEYWORDS:
            k += 1
            name = f"{base}_{k}"
        self.taken.add(name)
        return name


@dataclass
class RenameMap:
    """Item key to WhyML name, per namespace, plus the Boogie spelling for reports."""

    values: dict = field(default_factory=dict)  # key -> why name (globals and locals)
    types: dict = field(default_factory=dict)
    boogie: dict = field(default_factory=dict)  # (namespace, key) -> boogie name
    scopes: dict = field(default_factory=dict)  # key -> owning scope ("" for globals)

    def record(self, ns: str, key: str, boogie_name: str, why: str, scope: str = "") -> None:
        table = self.values if ns == "value" else self.types
        if key in table:
            return  # a formal or bound variable met again in a sibling routine
        table[key] = why
        self.boogie[(ns, key)] = boogie_name
        self.scopes[(ns, key)] = scope

    def changed(self) -> list[dict]:
        """Entries whose WhyML spelling differs from the Boogie one, in insertion order."""
        out = []
        for (ns, key), bname in self.boogie.items():
            why = (self.values if ns == "value" else self.types)[key]
            if why != bname:
                out.append({"namespace": ns, "key": key, "boogie": bname, "whyml": why})
        return out

    def inverse(self) -> dict:
        """WhyML name to Boogie name (global entries win over local ones)."""
        inv = {}
        for (ns, key), bname in sorted(self.boogie.items(), key=lambda kv: self.scopes[kv[0]] != ""):
            why = (self.values if ns == "value" else self.types)[key]
            inv.setdefault(why, bname)
        return inv


class Renamer:
    """Global namespaces plus a stack of local scopes for binders."""

    def __init__(self, rmap: RenameMap | None = None):
        self.map = rmap or RenameMap()
        self.values = Namespace(BUILTIN_VALUES | PRELUDE_VALUES)
        self.types = Namespace(BUILTIN_TYPES)
        self.scopes: list[set] = []
        self.scope_owner: list[str] = []
        self.current: dict[str, str] = {}  # local keys bound in the routine being encoded

    # globals

    def global_value(self, key: str, boogie_name: str) -> str:
        if key in self.map.values and self.map.scopes.get(("value", key)) == "":
            return self.map.values[key]
        why = self.values.allocate(sanitize_value(boogie_name))
        self.map.record("value", key, boogie_name, why)
        return why

    def derived_value(self, base: str) -> str:
        """A global name with no Boogie counterpart (implementation lets, helpers)."""
        return self.values.allocate(base)

    def global_type(self, key: str, boogie_name: str) -> str:
        if key in self.map.types:
            return self.map.types[key]
        why = self.types.allocate(sanitize_value(boogie_name))
        self.map.record("type", key, boogie_name, why)
        return why

    def type_name(self, key: str) -> str:
        return self.map.types[key]

    # locals

    def push(self, owner: str = "local") -> None:
        self.scopes.append(set())
        self.scope_owner.append(owner)

    def pop(self) -> None:
        self.scopes.pop()
        self.scope_owner.pop()
        if not self.scopes:
            self.current.clear()

    def _visible(self) -> set:
        out: set = set()
        for s in self.scopes:
            out |= s
        return out

    def local(self, key: str | None, boogie_name: str) -> str:
        base = sanitize_value(boogie_name)
        name, k = base, 0
        visible = self._visible()
        while name in self.values.taken or name in visible or name in WHY_KEYWORDS:
            k += 1
            name = f"{base}_{k}"
        self.scopes[-1].add(name)
        if key is not None:
            self.current[key] = name
            self.map.record("value", key, boogie_name, name, self.scope_owner[-1])
        return name

    def temp(self, base: str = "t") -> str:
        name, k = f"{base}0", 0
        visible = self._visible()
        while name in self.values.taken or name in visible:
            k += 1
            name = f"{base}{k}"
        self.scopes[-1].add(name)
        return name

    def value(self, key: str) -> str:
        if key in self.current:
            return self.current[key]
        return self.map.values[key]
