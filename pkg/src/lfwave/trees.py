"""N-valid trees over GF(p)^s labels.

A tree is stored as an immutable arena: node ``i`` has a label, a parent
id and an ordered tuple of child ids.  Ids are always canonical (BFS
order from the root, siblings sorted by label), so two trees with the
same shape compare equal and JSON dumps are reproducible.

Windows ending above depth ``k - 1`` are padded with implicit zero
ancestors above the root.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .algebra import Digits, all_blocks, block_code, check_params
from .errors import BasicStepError, ParameterError, TreeStructureError

Word = tuple[Digits, ...]


@dataclass(frozen=True, eq=False)
class ValidTree:
    p: int
    s: int
    N: int
    labels: tuple[Digits, ...]
    parents: tuple[int | None, ...]
    children: tuple[tuple[int, ...], ...]
    depths: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        check_params(self.p, self.s, self.N)
        n = len(self.labels)
        if n == 0 or len(self.parents) != n or len(self.children) != n:
            raise TreeStructureError("labels, parents and children must have equal nonzero length")
        for i, lab in enumerate(self.labels):
            if len(lab) != self.s or any(not 0 <= d < self.p for d in lab):
                raise TreeStructureError(f"node {i} has an invalid label {lab}")
        roots = [i for i, par in enumerate(self.parents) if par is None]
        if roots != [0]:
            raise TreeStructureError(f"node 0 must be the unique root, found roots {roots}")
        for i, kids in enumerate(self.children):
            for c in kids:
                if not 0 <= c < n or self.parents[c] != i:
                    raise TreeStructureError(f"child link {i}->{c} disagrees with parent table")
        for i, par in enumerate(self.parents):
            if par is not None and (not 0 <= par < n or i not in self.children[par]):
                raise TreeStructureError(f"parent link {i}->{par} disagrees with child table")
        depths = [-1] * n
        depths[0] = 0
        queue = deque([0])
        seen = 1
        while queue:
            v = queue.popleft()
            for c in self.children[v]:
                if depths[c] != -1:
                    raise TreeStructureError(f"node {c} reached twice")
                depths[c] = depths[v] + 1
                seen += 1
                queue.append(c)
        if seen != n:
            raise TreeStructureError("some nodes are unreachable from the root")
        object.__setattr__(self, "depths", tuple(depths))

    # -- basic structure ----------------------------------------------------

    @property
    def q(self) -> int:
        return self.p ** self.s

    @property
    def root(self) -> int:
        return 0

    @property
    def node_count(self) -> int:
        return len(self.labels)

    @property
    def height(self) -> int:
        return max(self.depths)

    def depth(self, v: int) -> int:
        return self.depths[v]

    def leaves(self) -> list[int]:
        return [i for i, kids in enumerate(self.children) if not kids]

    def ancestors(self, v: int) -> list[int]:
        """Path from ``v`` up to the root, ``v`` first."""
        out = [v]
        while self.parents[out[-1]] is not None:
            out.append(self.parents[out[-1]])
        return out

    def subtree(self, v: int) -> list[int]:
        out, stack = [], [v]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(self.children[u])
        return sorted(out)

    def window(self, v: int, k: int) -> Word:
        """The ``k`` labels ending at ``v``, top first, zero-padded above the root."""
        up = self.ancestors(v)[:k]
        zero = (0,) * self.s
        word = [self.labels[u] for u in reversed(up)]
        return tuple([zero] * (k - len(word)) + word)

    def __eq__(self, other):
        if not isinstance(other, ValidTree):
            return NotImplemented
        return (
            (self.p, self.s, self.N) == (other.p, other.s, other.N)
            and self.labels == other.labels
            and self.parents == other.parents
        )

    def __hash__(self):
        return hash((self.p, self.s, self.N, self.labels, self.parents))

    def fingerprint(self) -> str:
        """Short content hash used as provenance id."""
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "s": self.s,
            "N": self.N,
            "nodes": [
                {
                    "id": i,
                    "label": list(self.labels[i]),
                    "parent": self.parents[i],
                    "children": list(self.children[i]),
                }
                for i in range(self.node_count)
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> ValidTree:
        nodes = sorted(data["nodes"], key=lambda n: n["id"])
        if [n["id"] for n in nodes] != list(range(len(nodes))):
            raise TreeStructureError("node ids must be 0..n-1")
        return cls(
            int(data["p"]), int(data["s"]), int(data["N"]),
            tuple(tuple(int(d) for d in n["label"]) for n in nodes),
            tuple(None if n["parent"] is None else int(n["parent"]) for n in nodes),
            tuple(tuple(int(c) for c in n["children"]) for n in nodes),
        )


def canonical_tree(p: int, s: int, N: int, labels: Sequence[Digits], parents: Sequence[int | None]) -> ValidTree:
    """Renumber an arbitrary arena in BFS order with label-sorted siblings."""
    return _canonical(p, s, N, labels, parents)[0]


def _canonical(p, s, N, labels, parents) -> tuple[ValidTree, dict[int, int]]:
    n = len(labels)
    kids: list[list[int]] = [[] for _ in range(n)]
    root = None
    for i, par in enumerate(parents):
        if par is None:
            if root is not None:
                raise TreeStructureError("more than one root")
            root = i
        else:
            kids[par].append(i)
    if root is None:
        raise TreeStructureError("no root")
    order = []
    queue = deque([root])
    visited = set()
    while queue:
        v = queue.popleft()
        if v in visited:
            raise TreeStructureError("cycle in parent table")
        visited.add(v)
        order.append(v)
        queue.extend(sorted(kids[v], key=lambda c: (block_code(labels[c], p), c)))
    if len(order) != n:
        raise TreeStructureError("some nodes are unreachable from the root")
    new_id = {old: i for i, old in enumerate(order)}
    new_labels = tuple(tuple(labels[old]) for old in order)
    new_parents = tuple(None if parents[old] is None else new_id[parents[old]] for old in order)
    new_children = tuple(
        tuple(new_id[c] for c in sorted(kids[old], key=lambda c: (block_code(labels[c], p), c)))
        for old in order
    )
    return ValidTree(p, s, N, new_labels, new_parents, new_children), new_id


def build_basic_tree(p: int, s: int, N: int) -> ValidTree:
    """Minimal-height N-valid tree.

    A spine of ``N`` zeros, every nonzero label under the last spine
    node, then ``N - 1`` full levels carrying every label.  Height is
    ``2N - 1``.
    """
    check_params(p, s, N)
    blocks = all_blocks(p, s)
    labels: list[Digits] = []
    parents: list[int | None] = []
    for depth in range(N):
        labels.append(blocks[0])
        parents.append(None if depth == 0 else depth - 1)
    frontier = []
    for b in blocks[1:]:
        labels.append(b)
        parents.append(N - 1)
        frontier.append(len(labels) - 1)
    for _ in range(N - 1):
        nxt = []
        for v in frontier:
            for b in blocks:
                labels.append(b)
                parents.append(v)
                nxt.append(len(labels) - 1)
        frontier = nxt
    return canonical_tree(p, s, N, labels, parents)


def chain_tree(p: int, s: int, N: int, word: Iterable[Digits]) -> ValidTree:
    """A single path carrying ``word`` from the root down."""
    labels = [tuple(w) for w in word]
    parents = [None] + list(range(len(labels) - 1))
    return canonical_tree(p, s, N, labels, parents)


@dataclass
class TreeReport:
    root_zero: bool
    zero_spine: bool
    window_complete: bool
    window_unique: bool
    height: int
    node_count: int
    window_table: dict[Word, list[int]]
    missing: int = 0
    duplicates: list[Word] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.root_zero and self.zero_spine and self.window_complete and self.window_unique

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "root_zero": self.root_zero,
            "zero_spine": self.zero_spine,
            "window_complete": self.window_complete,
            "window_unique": self.window_unique,
            "height": self.height,
            "node_count": self.node_count,
            "missing_words": self.missing,
            "duplicate_words": [[list(b) for b in w] for w in self.duplicates],
        }


def n_window_table(t: ValidTree) -> dict[Word, list[int]]:
    """Map each N-word to the nodes (depth >= N-1) where it ends."""
    table: dict[Word, list[int]] = {}
    for v in range(t.node_count):
        if t.depths[v] >= t.N - 1:
            table.setdefault(t.window(v, t.N), []).append(v)
    return table


def validate_tree(t: ValidTree) -> TreeReport:
    """Check the four N-validity conditions and collect statistics."""
    zero = (0,) * t.s
    root_zero = t.labels[0] == zero
    spine_ok = True
    for j in range(t.N):
        level = [v for v in range(t.node_count) if t.depths[v] == j]
        if len(level) != 1 or t.labels[level[0]] != zero:
            spine_ok = False
            break
    table = n_window_table(t)
    dups = [w for w, vs in table.items() if len(vs) > 1]
    missing = t.q ** t.N - len(table)
    return TreeReport(
        root_zero=root_zero,
        zero_spine=spine_ok,
        window_complete=missing == 0,
        window_unique=not dups,
        height=t.height,
        node_count=t.node_count,
        window_table=table,
        missing=missing,
        duplicates=sorted(dups),
    )


def window_multiset(t: ValidTree, k: int | None = None) -> Counter:
    k = t.N if k is None else k
    return Counter(t.window(v, k) for v in range(t.node_count) if t.depths[v] >= t.N - 1)


def enumerate_windows(t: ValidTree, k: int) -> list[tuple[Word, int]]:
    """One ``(word, node)`` entry per node, in node-id (BFS) order."""
    if k < 1:
        raise ParameterError(f"window length must be >= 1, got {k}")
    return [(t.window(v, k), v) for v in range(t.node_count)]


def _context(t: ValidTree, v: int | None, k: int) -> Word:
    if k == 0:
        return ()
    if v is None:
        return ((0,) * t.s,) * k
    return t.window(v, k)


def check_move(t: ValidTree, node: int, target: int, require_leaf: bool = True) -> None:
    """Raise :class:`BasicStepError` unless moving ``node`` under ``target`` is admissible."""
    n = t.node_count
    if not (0 <= node < n and 0 <= target < n):
        raise BasicStepError("not applicable", "node id out of range")
    if t.depths[node] < t.N:
        raise BasicStepError("not applicable", f"node {node} sits at depth {t.depths[node]} < N={t.N}")
    if target in set(t.subtree(node)):
        raise BasicStepError("target inside subtree", f"{target} is inside the subtree of {node}")
    if require_leaf and t.children[target]:
        raise BasicStepError("not applicable", f"target {target} is not a leaf")
    if t.parents[node] == target:
        raise BasicStepError("not applicable", "target is already the parent")
    k = t.N - 1
    if _context(t, t.parents[node], k) != _context(t, target, k):
        raise BasicStepError(
            "window context mismatch",
            f"labels above node {node} differ from the labels ending at {target}",
        )


def basic_step(t: ValidTree, node: int, target: int, require_leaf: bool = True) -> ValidTree:
    """Detach the subtree at ``node`` and hang it under ``target``.

    The ``N - 1`` labels ending at ``target`` must equal those ending at
    the current parent, which keeps every N-window of the moved subtree
    intact.  ``require_leaf=False`` permits any non-descendant target
    with matching context; that form is needed to undo a move.
    """
    return basic_step_mapped(t, node, target, require_leaf)[0]


def basic_step_mapped(t: ValidTree, node: int, target: int, require_leaf: bool = True):
    """:func:`basic_step` plus the old-id -> new-id map of the renumbering."""
    check_move(t, node, target, require_leaf)
    parents = list(t.parents)
    parents[node] = target
    return _canonical(t.p, t.s, t.N, t.labels, parents)


def admissible_moves(t: ValidTree, require_leaf: bool = True) -> list[tuple[int, int]]:
    """Every ``(node, target)`` pair accepted by :func:`basic_step`."""
    k = t.N - 1
    by_context: dict[Word, list[int]] = {}
    candidates = t.leaves() if require_leaf else range(t.node_count)
    for v in candidates:
        by_context.setdefault(_context(t, v, k), []).append(v)
    moves = []
    for v in range(t.node_count):
        if t.depths[v] < t.N:
            continue
        inside = set(t.subtree(v))
        for target in by_context.get(_context(t, t.parents[v], k), []):
            if target not in inside and target != t.parents[v]:
                moves.append((v, target))
    return moves
