from __future__ import annotations

import re
from pathlib import Path

import pytest

from b2w.boogie import ast as A
from b2w.boogie.parser import parse_boogie
from b2w.cli import TranslateConfig, translate_source
from b2w.desugar import DesugarConfig, desugar
from b2w.sema.typecheck import typecheck

TESTS = Path(__file__).parent
CORPUS = TESTS / "corpus"
GOLDEN = TESTS / "golden"
CORPUS_FILES = sorted(CORPUS.glob("*.bpl"))


def translate(src: str, **opts):
    return translate_source(src, "t.bpl", TranslateConfig(**opts))


def desugared(src: str, **cfg):
    env = typecheck(parse_boogie(src, "t.bpl"))
    return desugar(env, DesugarConfig(**cfg))


def decls_of(program, cls):
    return [d for d in program.decls if isinstance(d, cls)]


def nodes(tree, cls):
    return [n for n in A.walk(tree) if isinstance(n, cls)]


TOKEN = re.compile(r"[A-Za-z_][\w']*|\d+(?:\.\d+)?|<>|<-|->|<=|>=|>\.|<\.|\+\.|-\.|\*\.|/\.|/\\|\\/|\S")


def tokens(text: str) -> list[str]:
    return TOKEN.findall(text)


@pytest.fixture(params=CORPUS_FILES, ids=lambda p: p.stem)
def corpus_file(request) -> Path:
    return request.param


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
