"""Hash Prefix Table FIB: exact-match hash index plus prefix trees.

The table keeps every entry in two coupled structures: a hash index from
the digest of the full canonical key to the entry (exact lookups,
replacement, counting), and one prefix tree per identifier kind spelling
the key components (longest-prefix match and the logical relations
between keys).  IP keys live in per-version binary tries and match on
leading bits, CIDR-style; all other kinds match on whole components.

Entries either forward (to a face) or translate (to another identifier,
possibly of a different kind — that cross-kind hop is the point of the
structure).  The table supports many concurrent readers or one writer;
it never mutates under a reader's feet during pure lookups.

Memory layout notes: entries at tree leaves are stored in the parent
node's tip map rather than as child nodes, and canonical strings are
built on demand, which keeps ten-million-entry tables inside a few GB.
"""

from __future__ import annotations

import enum
import hashlib
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .identifiers import (
    HIERARCHICAL_KINDS,
    Identifier,
    Kind,
    WrongKind,
    ip_leading_bits,
    parse_identifier,
)


@dataclass(frozen=True, slots=True)
class Forward:
    face_id: int


@dataclass(frozen=True, slots=True)
class Translate:
    target: Identifier


Action = Forward | Translate


class Origin(enum.Enum):
    STATIC = "static"
    LEARNED = "learned"


@dataclass(frozen=True, slots=True)
class HptFibEntry:
    """A keyed forwarding-or-translation rule.

    Whether ``action.face_id`` names a live face is the owning router's
    concern; a bare table only stores the rule.
    """

    key: Identifier
    action: Action
    origin: Origin = Origin.STATIC


class _TreeNode:
    """Prefix-tree node: subtrees per label plus entries ending one level down."""

    __slots__ = ("children", "tips")

    def __init__(self) -> None:
        self.children: dict[str, _TreeNode] | None = None
        self.tips: dict[str, HptFibEntry] | None = None


def _key_digest(raw: str) -> bytes:
    return hashlib.blake2b(raw.encode(), digest_size=16).digest()


# IP trie nodes are [zero-branch, one-branch, entry] lists.
_LEFT, _RIGHT, _ENTRY = 0, 1, 2


class HptFib:
    """The dual-indexed translation-and-forwarding table."""

    def __init__(self) -> None:
        self._hash: dict[bytes, HptFibEntry] = {}
        self._trees: dict[Kind, _TreeNode] = {k: _TreeNode() for k in HIERARCHICAL_KINDS}
        self._ip_roots: dict[int, list] = {4: [None, None, None], 16: [None, None, None]}

    def __len__(self) -> int:
        return len(self._hash)

    @property
    def entry_count(self) -> int:
        return len(self._hash)

    def insert(self, entry: HptFibEntry) -> int:
        """Add or replace the rule for ``entry.key``; returns the new count."""
        self._hash[_key_digest(entry.key.raw)] = entry
        key = entry.key
        if key.kind is Kind.IP:
            node = self._ip_roots[len(key.addr)]
            for bit in ip_leading_bits(key):
                nxt = node[bit]
                if nxt is None:
                    nxt = node[bit] = [None, None, None]
                node = nxt
            node[_ENTRY] = entry
        else:
            comps = key.components
            node = self._trees[key.kind]
            for label in comps[:-1]:
                if node.children is None:
                    node.children = {}
                nxt = node.children.get(label)
                if nxt is None:
                    nxt = node.children[label] = _TreeNode()
                node = nxt
            if node.tips is None:
                node.tips = {}
            node.tips[comps[-1]] = entry
        return len(self._hash)

    def remove(self, key: Identifier) -> bool:
        """Drop the rule for ``key``; returns False if absent."""
        digest = _key_digest(key.raw)
        if digest not in self._hash:
            return False
        del self._hash[digest]
        if key.kind is Kind.IP:
            root = self._ip_roots[len(key.addr)]
            path = [root]
            node = root
            for bit in ip_leading_bits(key):
                node = node[bit]
                path.append(node)
            node[_ENTRY] = None
            # Prune childless, entry-less nodes bottom-up.
            bits = ip_leading_bits(key)
            for depth in range(len(path) - 1, 0, -1):
                n = path[depth]
                if n[_LEFT] is None and n[_RIGHT] is None and n[_ENTRY] is None:
                    path[depth - 1][bits[depth - 1]] = None
                else:
                    break
        else:
            comps = key.components
            node = self._trees[key.kind]
            path = [node]
            for label in comps[:-1]:
                node = node.children[label]
                path.append(node)
            del node.tips[comps[-1]]
            if not node.tips:
                node.tips = None
            for depth in range(len(path) - 1, 0, -1):
                n = path[depth]
                if not n.children and not n.tips:
                    parent = path[depth - 1]
                    del parent.children[comps[depth - 1]]
                    if not parent.children:
                        parent.children = None
                else:
                    break
        return True

    def lookup_exact(self, key: Identifier) -> HptFibEntry | None:
        return self._hash.get(_key_digest(key.raw))

    def longest_prefix_match(self, name: Identifier) -> HptFibEntry | None:
        """Entry whose key is the longest prefix of ``name``, or None."""
        if name.kind is Kind.IP:
            node = self._ip_roots[len(name.addr)]
            best = node[_ENTRY]
            for bit in ip_leading_bits(name):
                node = node[bit]
                if node is None:
                    break
                if node[_ENTRY] is not None:
                    best = node[_ENTRY]
            return best
        best = None
        node = self._trees[name.kind]
        for label in name.components:
            if node.tips is not None:
                hit = node.tips.get(label)
                if hit is not None:
                    best = hit
            if node.children is None:
                break
            node = node.children.get(label)
            if node is None:
                break
        return best

    def translate(self, name: Identifier) -> Identifier | None:
        """Rewrite ``name`` through its longest translation rule.

        Forward rules are not translations and yield a miss.  When both
        the matched key and the target are hierarchical, the unmatched
        suffix of ``name`` rides along onto the target.
        """
        match = self.longest_prefix_match(name)
        if match is None or not isinstance(match.action, Translate):
            return None
        target = match.action.target
        if (
            name.kind is not Kind.IP
            and match.key.kind is not Kind.IP
            and target.kind is not Kind.IP
        ):
            suffix = name.components[len(match.key.components) :]
            if suffix:
                return target.child(*suffix)
        return target

    # -- whole-table views ------------------------------------------------

    def entries(self) -> Iterator[HptFibEntry]:
        """All entries via the hash index."""
        return iter(self._hash.values())

    def tree_entries(self) -> Iterator[HptFibEntry]:
        """All entries via the prefix trees (coherence cross-check path)."""
        for root in self._trees.values():
            yield from _walk_tree(root)
        for iproot in self._ip_roots.values():
            yield from _walk_ip(iproot)

    def check_coherent(self) -> bool:
        """Dual-index coherence: both views hold exactly the same rules."""
        via_hash = {e.key.raw for e in self.entries()}
        via_tree = [e.key.raw for e in self.tree_entries()]
        return len(via_tree) == len(via_hash) and set(via_tree) == via_hash


def _walk_tree(node: _TreeNode) -> Iterator[HptFibEntry]:
    if node.tips is not None:
        yield from node.tips.values()
    if node.children is not None:
        for child in node.children.values():
            yield from _walk_tree(child)


def _walk_ip(node: list) -> Iterator[HptFibEntry]:
    if node[_ENTRY] is not None:
        yield node[_ENTRY]
    for branch in (node[_LEFT], node[_RIGHT]):
        if branch is not None:
            yield from _walk_ip(branch)


# -- text load/dump -------------------------------------------------------


def dump_text(fib: HptFib) -> str:
    """Line-oriented dump: ``<canonical-key> <FWD face|XLT target>``.

    Lines are sorted by key so equal tables dump identically.  Entry
    origin is not part of the wire format.
    """
    lines = []
    for entry in fib.entries():
        if isinstance(entry.action, Forward):
            lines.append(f"{entry.key.raw} FWD {entry.action.face_id}")
        else:
            lines.append(f"{entry.key.raw} XLT {entry.action.target.raw}")
    lines.sort()
    return "\n".join(lines) + ("\n" if lines else "")


def load_text(fib: HptFib, text: str) -> int:
    """Bulk-insert rules from :func:`dump_text` lines; returns rules read."""
    count = 0
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3 or parts[1] not in ("FWD", "XLT"):
            raise ValueError(f"line {lineno}: expected '<key> FWD <face>|XLT <target>'")
        key = parse_identifier(parts[0])
        if parts[1] == "FWD":
            action: Action = Forward(int(parts[2]))
        else:
            action = Translate(parse_identifier(parts[2]))
        fib.insert(HptFibEntry(key, action))
        count += 1
    return count


# -- synthetic workload ---------------------------------------------------

_STEM_POOL = 4096
_LABEL_VOCAB = 512


def generate_entries(n: int, seed: int) -> Iterator[HptFibEntry]:
    """Deterministic stream of ``n`` distinct synthetic rules.

    Prefix popularity is Zipf(s=1.0) over a fixed stem pool, key depth is
    uniform in [2, 6], and kinds are mixed (content-heavy, with identity,
    geospatial and IPv4 keys).  The same seed always yields the same
    stream; a trailing per-entry label keeps every key distinct so bulk
    inserts of n entries count exactly n.
    """
    if n < 0:
        raise ValueError("entry count must be >= 0")
    rng = random.Random(seed)

    vocab = [
        "".join(rng.choice("abcdefghijklmnopqrstuvwxyz") for _ in range(rng.randint(3, 6)))
        for _ in range(_LABEL_VOCAB)
    ]
    path_kinds = [Kind.CONTENT, Kind.IDENTITY, Kind.GEO]
    stems: list[tuple[Kind, tuple[str, ...]]] = []
    for _ in range(_STEM_POOL):
        kind = rng.choice(path_kinds)
        depth = rng.randint(1, 5)
        stems.append((kind, tuple(rng.choice(vocab) for _ in range(depth))))
    # Zipf(s=1.0) over stem ranks via the cumulative harmonic weights.
    cum = []
    total = 0.0
    for rank in range(1, _STEM_POOL + 1):
        total += 1.0 / rank
        cum.append(total)

    targets = [
        Identifier(Kind.IP, (), bytes([10, rng.randrange(256), rng.randrange(256), 1]))
        for _ in range(128)
    ] + [
        Identifier(rng.choice(path_kinds), (rng.choice(vocab), rng.choice(vocab)))
        for _ in range(128)
    ]
    forwards = [Forward(face) for face in range(16)]

    from bisect import bisect_left

    for i in range(n):
        roll = rng.random()
        if roll < 0.15:
            # Distinct /24 IPv4 prefixes, counter in the top three octets.
            key = Identifier(
                Kind.IP, (), (i & 0xFFFFFF).to_bytes(3, "big") + b"\x00", prefix_len=24
            )
        else:
            kind, stem = stems[bisect_left(cum, rng.random() * total)]
            key = Identifier(kind, stem + (f"u{i:07d}",))
        if rng.random() < 0.7:
            action: Action = forwards[rng.randrange(16)]
        else:
            action = Translate(targets[rng.randrange(len(targets))])
        origin = Origin.STATIC if rng.random() < 0.8 else Origin.LEARNED
        yield HptFibEntry(key, action, origin)


def bench_insert(
    sizes: Iterable[int], seed: int = 7, batch: int = 100_000
) -> list[tuple[int, float, float]]:
    """Time bulk inserts at each size; rows are (n, seconds, ns_per_entry).

    Generation runs outside the timed region in ``batch``-sized chunks so
    the clock sees only table work; gc is paused during timing to keep
    the per-entry figure about the structure, not the collector.
    """
    import gc
    import time
    from itertools import islice

    rows = []
    for size in sizes:
        fib = HptFib()
        stream = generate_entries(size, seed)
        elapsed = 0.0
        gc_was_enabled = gc.isenabled()
        gc.disable()
        try:
            while True:
                chunk = list(islice(stream, batch))
                if not chunk:
                    break
                insert = fib.insert
                t0 = time.perf_counter()
                for entry in chunk:
                    insert(entry)
                elapsed += time.perf_counter() - t0
        finally:
            if gc_was_enabled:
                gc.enable()
        assert len(fib) == size
        rows.append((size, elapsed, elapsed / size * 1e9 if size else 0.0))
        del fib
        gc.collect()
    return rows
