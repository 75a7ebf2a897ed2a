"""Cantor and Baire space, finite sequences, the embedding r(f), and fan search."""

from __future__ import annotations

import itertools
import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .reals import RealCode

FinSeq = tuple[int, ...]

DEFAULT_FAN_DEPTH = 22


class DepthBudgetExceeded(Exception):
    pass


class PrefixClosureViolation(Exception):
    def __init__(self, node: FinSeq):
        super().__init__(f"node {format_finseq(node)} is in the tree but its parent is not")
        self.node = node


class BaireSeq:
    """An element of N^N given by a total generator."""

    def __init__(self, gen: Callable[[int], int], name: str | None = None):
        self._gen = gen
        self.name = name

    def __call__(self, n: int) -> int:
        v = self._gen(n)
        if v < 0:
            raise ValueError(f"negative value {v} at index {n}")
        return v

    def prefix(self, n: int) -> FinSeq:
        return tuple(self(i) for i in range(n))

    @classmethod
    def from_list(cls, entries: Sequence[int], tail: int = 0) -> BaireSeq:
        entries = tuple(entries)
        return cls(lambda n: entries[n] if n < len(entries) else tail,
                   name=f"{format_finseq(entries)}{tail}...")

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name or format_finseq(self.prefix(8)) + '...'})"


class BinSeq(BaireSeq):
    """An element of 2^N.  ``support`` (if given) says every entry past it is 0."""

    def __init__(self, gen: Callable[[int], int], support: int | None = None,
                 name: str | None = None):
        super().__init__(gen, name)
        self.support = support

    def __call__(self, n: int) -> int:
        if self.support is not None and n > self.support:
            return 0
        v = self._gen(n)
        if v not in (0, 1):
            raise ValueError(f"binary sequence has value {v} at index {n}")
        return v

    @classmethod
    def from_list(cls, bits: Sequence[int], tail: int = 0) -> BinSeq:
        bits = tuple(bits)
        support = len(bits) - 1 if tail == 0 else None
        return cls(lambda n: bits[n] if n < len(bits) else tail, support=support,
                   name=f"{format_finseq(bits)}{tail}...")

    @classmethod
    def periodic(cls, pattern: Sequence[int]) -> BinSeq:
        pattern = tuple(pattern)
        return cls(lambda n: pattern[n % len(pattern)],
                   name="(" + "".join(map(str, pattern)) + ")*")

    def support_ok(self, upto: int) -> bool:
        """Sample the finite-support descriptor against the raw generator."""
        if self.support is None:
            return True
        return all(self._gen(n) == 0 for n in range(self.support + 1, upto))


def prefix(g: BaireSeq, n: int) -> FinSeq:
    return g.prefix(n)


def format_finseq(s: Iterable[int]) -> str:
    return "[" + ",".join(str(v) for v in s) + "]"


def parse_finseq(text: str) -> FinSeq:
    text = text.strip()
    if not re.fullmatch(r"\[\s*(\d+\s*(,\s*\d+\s*)*)?\]", text):
        raise ValueError(f"not a finite sequence: {text!r}")
    body = text[1:-1].strip()
    return tuple(int(v) for v in body.split(",")) if body else ()


class _PartialSums:
    def __init__(self, f: BinSeq):
        self.f = f
        self.sums: list[Fraction] = []
        self.lock = threading.Lock()

    def at(self, k: int) -> Fraction:
        with self.lock:
            while len(self.sums) <= k:
                n = len(self.sums)
                prev = self.sums[-1] if self.sums else Fraction(0)
                self.sums.append(prev + Fraction(self.f(n), 1 << (n + 1)))
            return self.sums[k]


def embed_real(f: BinSeq) -> RealCode:
    """The real sum f(n)/2^(n+1); approximant k is the partial sum through k."""
    return RealCode(_PartialSums(f).at, tag="embedded")


@dataclass
class DecidableTree:
    membership: Callable[[FinSeq], bool]
    alphabet: int = 2

    def __contains__(self, node: FinSeq) -> bool:
        return bool(self.membership(tuple(node)))

    @classmethod
    def from_nodes(cls, nodes: Iterable[Sequence[int]], alphabet: int = 2) -> DecidableTree:
        """The prefix closure of an explicit node set."""
        closure: set[FinSeq] = set()
        for node in nodes:
            node = tuple(node)
            closure.update(node[:i] for i in range(len(node) + 1))
        return cls(lambda s: s in closure, alphabet)


def load_tree(text: str, alphabet: int = 2) -> DecidableTree:
    nodes = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            nodes.append(parse_finseq(line))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return DecidableTree.from_nodes(nodes, alphabet)


@dataclass(frozen=True)
class PathPrefix:
    path: FinSeq


@dataclass(frozen=True)
class DiesAt:
    level: int


def wkl_search(tree: DecidableTree, depth: int) -> PathPrefix | DiesAt:
    """Lexicographically least node of length ``depth`` with all prefixes in the tree.

    Only "survives to depth d" is claimed; the node need not extend to an
    infinite path.  Children of rejected nodes are probed so that a tree
    that is not prefix-closed is reported rather than silently searched.
    """
    if tree.alphabet != 2:
        raise ValueError("wkl_search needs a binary tree")
    if () not in tree:
        for b in (0, 1):
            if (b,) in tree:
                raise PrefixClosureViolation((b,))
        return DiesAt(0)
    deepest = 0

    def dfs(node: FinSeq) -> FinSeq | None:
        nonlocal deepest
        deepest = max(deepest, len(node))
        if len(node) == depth:
            return node
        for b in (0, 1):
            child = node + (b,)
            if child in tree:
                found = dfs(child)
                if found is not None:
                    return found
            else:
                for c in (0, 1):
                    if child + (c,) in tree:
                        raise PrefixClosureViolation(child + (c,))
        return None

    found = dfs(())
    if found is not None:
        return PathPrefix(found)
    return DiesAt(deepest + 1)


def fan_enumerate(depth: int, max_depth: int = DEFAULT_FAN_DEPTH) -> Iterator[FinSeq]:
    """All binary sequences of length ``depth`` in lexicographic order."""
    if depth > max_depth:
        raise DepthBudgetExceeded(f"fan depth {depth} exceeds budget {max_depth}")
    return itertools.product((0, 1), repeat=depth)


def bounded_enumerate(branching: int, depth: int, max_leaves: int) -> Iterator[FinSeq]:
    """All sequences over ``{0..branching-1}`` of length ``depth``, lexicographic."""
    if branching ** depth > max_leaves:
        raise DepthBudgetExceeded(
            f"{branching}^{depth} prefixes exceed the budget of {max_leaves}")
    return itertools.product(range(branching), repeat=depth)
