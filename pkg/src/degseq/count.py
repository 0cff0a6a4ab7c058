"""Exact counts of graph spaces by memoized recursion over canonical states."""

from __future__ import annotations

import ast
import json
import os
import struct
from typing import BinaryIO

from .core import Kind
from .errors import MemoryBudgetExceeded
from .mechanism import TERMINAL, make_mechanism

MAGIC = b"DSQT1"
# rough per-entry footprint of a memo record (key tuple, int, dict slot)
_BYTES_PER_STATE = 400


def _budget_from_env() -> int | None:
    raw = os.environ.get("DEGSEQ_MEM_BUDGET_MB")
    if not raw:
        return None
    return int(raw)


class CountTable:
    """Completion counts for every state the mechanism can reach.

    ``table[key]`` is the number of labeled graphs that complete the state
    ``key``. ``table.total`` is the size of the whole space.
    """

    def __init__(self, kind, a, b=None, budget_mb: int | None = None):
        self.kind = Kind.parse(kind)
        self.a = list(a)
        self.b = None if b is None else list(b)
        self.mechanism = make_mechanism(self.kind, self.a, self.b)
        self.budget_mb = _budget_from_env() if budget_mb is None else budget_mb
        self.memo: dict = {TERMINAL: 1}
        self.root = self.mechanism.root()

    def __len__(self) -> int:
        return len(self.memo)

    def __contains__(self, key) -> bool:
        return key in self.memo

    def __getitem__(self, key) -> int:
        if key is None:
            return 0
        got = self.memo.get(key)
        if got is None:
            got = self.fill(key)
        return got

    @property
    def total(self) -> int:
        return self[self.root]

    def _check_budget(self):
        if self.budget_mb is not None and len(self.memo) * _BYTES_PER_STATE > self.budget_mb * 2**20:
            raise MemoryBudgetExceeded(len(self.memo), self.budget_mb)

    def fill(self, key) -> int:
        """Count completions of ``key``, storing every state visited on the way."""
        if key is None:
            return 0
        memo = self.memo
        if key in memo:
            return memo[key]
        expand = self.mechanism.expand
        pending: dict = {}
        stack = [(key, None)]
        while stack:
            top, ctx = stack[-1]
            if top in memo:
                stack.pop()
                continue
            kids = pending.get(top)
            if kids is None:
                kids = expand(top, ctx)
                pending[top] = kids
                missing = [(k, c) for _, k, c in kids if k not in memo]
                if missing:
                    stack.extend(missing)
                    continue
            memo[top] = sum(mult * memo[k] for mult, k, _ in kids)
            del pending[top]
            stack.pop()
            if len(memo) & 0xFFF == 0:
                self._check_budget()
        self._check_budget()
        return memo[key]

    # persistence

    def header(self) -> dict:
        return {"kind": self.kind.value, "a": self.a, "b": self.b}

    def dump(self, fh: BinaryIO) -> None:
        fh.write(MAGIC)
        _write_record(fh, json.dumps(self.header(), sort_keys=True).encode())
        fh.write(struct.pack(">Q", len(self.memo)))
        for key, value in self.memo.items():
            _write_record(fh, repr(key).encode())
            _write_record(fh, value.to_bytes(max(1, (value.bit_length() + 7) // 8), "big"))

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            self.dump(fh)

    @classmethod
    def load(cls, path) -> "CountTable":
        with open(path, "rb") as fh:
            if fh.read(len(MAGIC)) != MAGIC:
                raise ValueError(f"{path} is not a count table")
            head = json.loads(_read_record(fh))
            table = cls(head["kind"], head["a"], head["b"])
            (n,) = struct.unpack(">Q", fh.read(8))
            for _ in range(n):
                key = ast.literal_eval(_read_record(fh).decode())
                value = int.from_bytes(_read_record(fh), "big")
                table.memo[key] = value
        return table

    def matches(self, kind, a, b=None) -> bool:
        return self.kind is Kind.parse(kind) and self.a == list(a) and self.b == (None if b is None else list(b))


def _write_record(fh, data: bytes) -> None:
    fh.write(struct.pack(">I", len(data)))
    fh.write(data)


def _read_record(fh) -> bytes:
    raw = fh.read(4)
    if len(raw) != 4:
        raise ValueError("truncated count table")
    (n,) = struct.unpack(">I", raw)
    data = fh.read(n)
    if len(data) != n:
        raise ValueError("truncated count table")
    return data


def build_table(a, b=None, kind="bipartite", budget_mb: int | None = None) -> CountTable:
    """Count table with every reachable state filled in."""
    kind = Kind.parse(kind)
    if kind is Kind.UNDIRECTED:
        table = CountTable(kind, a, None, budget_mb)
    else:
        table = CountTable(kind, a, b, budget_mb)
    table.fill(table.root)
    return table


def count_bipartite(a, b) -> int:
    return build_table(a, b, Kind.BIPARTITE).total


def count_directed(a, b) -> int:
    return build_table(a, b, Kind.DIRECTED).total


def count_undirected(d) -> int:
    return build_table(d, None, Kind.UNDIRECTED).total


def count(kind, a, b=None) -> int:
    return build_table(a, b, kind).total
