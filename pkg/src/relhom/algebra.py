"""Finite operations and the algebra toolbox.

Operations are dense tables indexed by argument tuples.  Everything here is
exhaustive verification over small carriers: law checks report a witnessing
pair on failure, congruences are found by enumerating all partitions, and
the almost-triviality decision builds one canonical candidate partition and
verifies it (with exhaustive partition search kept as a test oracle).
"""

from dataclasses import dataclass
from itertools import combinations, product as _iproduct
import json

from .errors import SchemaError, SizeGuardError
from .homs import is_hom
from .structures import Structure, element_label, power

CONGRUENCE_CARRIER_GUARD = 8
ALMOST_TRIVIAL_ARITY_GUARD = 10


class FiniteOperation:
    """Total operation on a finite ordered base set."""

    __slots__ = ("arity", "base", "table", "_index")

    def __init__(self, arity, base, table):
        if not isinstance(arity, int) or arity < 1:
            raise SchemaError(f"invalid arity {arity!r}")
        self.arity = arity
        self.base = tuple(base)
        self._index = {e: i for i, e in enumerate(self.base)}
        if len(self._index) != len(self.base):
            raise SchemaError("operation base contains duplicates")
        self.table = {tuple(args): value for args, value in table.items()}
        expected = len(self.base) ** arity
        if len(self.table) != expected:
            raise SchemaError(
                f"operation table has {len(self.table)} entries, expected {expected}"
            )
        for args, value in self.table.items():
            if len(args) != arity or any(a not in self._index for a in args):
                raise SchemaError(f"bad table key {args!r}")
            if value not in self._index:
                raise SchemaError(f"table value {value!r} outside base")

    @classmethod
    def from_function(cls, arity, base, fn):
        base = tuple(base)
        table = {args: fn(*args) for args in _iproduct(base, repeat=arity)}
        return cls(arity, base, table)

    def __call__(self, *args):
        try:
            return self.table[args]
        except KeyError:
            raise ValueError(f"arguments {args!r} outside operation base") from None

    def __eq__(self, other):
        if not isinstance(other, FiniteOperation):
            return NotImplemented
        return (
            self.arity == other.arity
            and self.base == other.base
            and self.table == other.table
        )

    __hash__ = None

    def __repr__(self):
        return f"FiniteOperation(arity={self.arity}, |base|={len(self.base)})"


@dataclass(frozen=True)
class AlgebraView:
    """A carrier subset together with operations it is closed under."""

    carrier: frozenset
    operations: tuple

    def __post_init__(self):
        for op in self.operations:
            for args in _iproduct(sorted(self.carrier, key=op.base.index), repeat=op.arity):
                if op(*args) not in self.carrier:
                    raise SchemaError(
                        f"carrier not closed: {args!r} maps to {op(*args)!r}"
                    )

    def sorted_carrier(self):
        order = self.operations[0].base.index if self.operations else None
        return sorted(self.carrier, key=order) if order else sorted(self.carrier)


# -- polymorphisms and operation laws ----------------------------------------


def is_polymorphism(b: Structure, op: FiniteOperation) -> bool:
    """Is every relation of ``b`` closed under coordinatewise application?"""
    if set(op.base) != set(b.universe):
        raise SchemaError("operation base differs from the structure universe")
    for name, _ in b.signature.symbols:
        rel = b.relations[name]
        for rows in _iproduct(rel, repeat=op.arity):
            image = tuple(op(*(row[i] for row in rows)) for i in range(len(rows[0])))
            if image not in rel:
                return False
    return True


def is_polymorphism_via_power(b: Structure, op: FiniteOperation) -> bool:
    """Second route: the operation as a map from the n-th power, checked by
    ``is_hom``.  Must agree with ``is_polymorphism`` everywhere."""
    if set(op.base) != set(b.universe):
        raise SchemaError("operation base differs from the structure universe")
    pw = power(b, op.arity)
    mapping = {e: op(*e) for e in pw.universe}
    return is_hom(pw, b, mapping)


def is_majority(op: FiniteOperation) -> bool:
    """m(x,y,y) = m(y,x,y) = m(y,y,x) = y for all x, y."""
    if op.arity != 3:
        raise SchemaError("majority check needs a ternary operation")
    for x in op.base:
        for y in op.base:
            if not (op(x, y, y) == op(y, x, y) == op(y, y, x) == y):
                return False
    return True


def two_semilattice_witness(op: FiniteOperation):
    """None, or (law, x, y) for the first failing law instance."""
    if op.arity != 2:
        raise SchemaError("2-semilattice check needs a binary operation")
    for x in op.base:
        if op(x, x) != x:
            return ("idempotency", x, x)
    for x in op.base:
        for y in op.base:
            if op(x, y) != op(y, x):
                return ("commutativity", x, y)
    for x in op.base:
        for y in op.base:
            if op(x, op(x, y)) != op(op(x, x), y):
                return ("restricted associativity", x, y)
    return None


def is_2semilattice(op: FiniteOperation) -> bool:
    return two_semilattice_witness(op) is None


def conservative_witness(op: FiniteOperation):
    if op.arity != 2:
        raise SchemaError("conservativity check needs a binary operation")
    for x in op.base:
        for y in op.base:
            if op(x, y) not in (x, y):
                return (x, y)
    return None


def is_conservative(op: FiniteOperation) -> bool:
    return conservative_witness(op) is None


# -- induced digraph and strongly connected components ------------------------


def induced_digraph(op: FiniteOperation) -> frozenset:
    """Edges (a, b) with a*b = b; defined for idempotent binary operations,
    so every element carries a self-loop."""
    if op.arity != 2:
        raise SchemaError("induced digraph needs a binary operation")
    for x in op.base:
        if op(x, x) != x:
            raise SchemaError(f"operation is not idempotent at {x!r}")
    return frozenset(
        (a, b) for a in op.base for b in op.base if op(a, b) == b
    )


def strongly_connected_components(nodes, edges):
    """Tarjan's algorithm, iterative; components in deterministic order."""
    nodes = list(nodes)
    adj = {v: [] for v in nodes}
    for a, b in edges:
        adj[a].append(b)
    order = {v: i for i, v in enumerate(nodes)}
    for v in adj:
        adj[v].sort(key=order.__getitem__)
    index = {}
    low = {}
    onstack = set()
    stack = []
    counter = [0]
    out = []

    def visit(root):
        work = [(root, iter(adj[root]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        onstack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    onstack.add(w)
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                if w in onstack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    onstack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                out.append(frozenset(comp))

    for v in nodes:
        if v not in index:
            visit(v)
    return out


def maximal_scc(view: AlgebraView) -> frozenset:
    """The unique strongly connected component of the induced digraph with
    no outgoing edge.  Defined for a 2-semilattice operation on the carrier;
    uniqueness is not guaranteed otherwise and is verified here."""
    ops = [op for op in view.operations if op.arity == 2]
    if len(ops) != 1:
        raise SchemaError("maximal_scc expects exactly one binary operation")
    op = ops[0]
    restricted = FiniteOperation.from_function(
        2, view.sorted_carrier(), lambda a, b: op(a, b)
    )
    if not is_2semilattice(restricted):
        raise SchemaError("operation is not a 2-semilattice on the carrier")
    nodes = restricted.base
    edges = induced_digraph(restricted)
    comps = strongly_connected_components(nodes, edges)
    edge_set = set(edges)
    maximal = [
        c
        for c in comps
        if not any((a, b) in edge_set for a in c for b in nodes if b not in c)
    ]
    if len(maximal) != 1:
        raise SchemaError("maximal component is not unique")
    return maximal[0]


# -- subalgebras, congruences, ideals ----------------------------------------


def subalgebra_closure(operations, seed) -> frozenset:
    """Least superset of ``seed`` closed under every given operation."""
    seed = frozenset(seed)
    if not seed:
        raise SchemaError("closure of the empty set is not defined")
    current = set(seed)
    changed = True
    while changed:
        changed = False
        for op in operations:
            base_order = {e: i for i, e in enumerate(op.base)}
            elems = sorted(current, key=base_order.__getitem__)
            for args in _iproduct(elems, repeat=op.arity):
                value = op(*args)
                if value not in current:
                    current.add(value)
                    changed = True
    return frozenset(current)


def _partitions(items):
    """All set partitions, by restricted-growth strings (deterministic)."""
    items = list(items)
    n = len(items)
    if n == 0:
        return
    codes = [0] * n

    def rec(i, maxcode):
        if i == n:
            blocks = {}
            for item, c in zip(items, codes):
                blocks.setdefault(c, set()).add(item)
            yield tuple(frozenset(blocks[c]) for c in sorted(blocks))
            return
        for c in range(maxcode + 2):
            codes[i] = c
            yield from rec(i + 1, max(maxcode, c))

    yield from rec(0, -1)


def congruences(view: AlgebraView) -> list:
    """All partitions of the carrier preserved by every operation."""
    carrier = view.sorted_carrier()
    if len(carrier) > CONGRUENCE_CARRIER_GUARD:
        raise SizeGuardError(
            f"congruence search guard: carrier of size {len(carrier)}"
        )
    found = []
    for partition in _partitions(carrier):
        block_of = {}
        for bi, block in enumerate(partition):
            for e in block:
                block_of[e] = bi
        ok = True
        for op in view.operations:
            for args1 in _iproduct(carrier, repeat=op.arity):
                related = [
                    [e for e in carrier if block_of[e] == block_of[a]] for a in args1
                ]
                v1 = block_of[op(*args1)]
                for args2 in _iproduct(*related):
                    if block_of[op(*args2)] != v1:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            found.append(partition)
    return found


def is_simple(view: AlgebraView) -> bool:
    """Only the discrete and full partitions are congruences."""
    carrier = view.carrier
    for partition in congruences(view):
        if len(partition) not in (1, len(carrier)):
            return False
    return True


def is_ideal(op: FiniteOperation, inner, outer) -> bool:
    """Relative to a majority operation: m(x, y, z) stays in ``inner`` for
    x, z in ``inner`` and y in ``outer``."""
    inner = frozenset(inner)
    outer = frozenset(outer)
    if not is_majority(op):
        raise SchemaError("ideal check needs a majority operation")
    if not inner <= outer or not outer <= set(op.base):
        raise SchemaError("need inner subset of outer subset of the base")
    for x in inner:
        for z in inner:
            for y in outer:
                if op(x, y, z) not in inner:
                    return False
    return True


# -- subdirectness and almost triviality --------------------------------------


def is_subdirect(relation, factors) -> bool:
    """Does the relation project onto every factor?"""
    factors = [frozenset(f) for f in factors]
    relation = set(relation)
    for t in relation:
        if len(t) != len(factors):
            raise SchemaError(f"tuple {t!r} does not match {len(factors)} factors")
    for i, factor in enumerate(factors):
        if {t[i] for t in relation} != factor:
            return False
    return True


def verify_almost_trivial(relation, arity, blocks) -> bool:
    """Check the two defining conditions for a candidate coordinate partition:
    the relation is the product of its block projections, and every block
    projection is a graph of coordinatewise bijections."""
    relation = set(relation)
    blocks = [tuple(sorted(block)) for block in blocks]
    covered = sorted(i for block in blocks for i in block)
    if covered != list(range(arity)):
        raise SchemaError("blocks must partition the coordinate positions")
    projections = []
    for block in blocks:
        proj = {tuple(t[i] for i in block) for t in relation}
        projections.append(proj)
        size = len(proj)
        for pos in range(len(block)):
            if len({p[pos] for p in proj}) != size:
                return False
    for combo in _iproduct(*projections):
        tup = [None] * arity
        for block, chosen in zip(blocks, combo):
            for pos, coord in enumerate(block):
                tup[coord] = chosen[pos]
        if tuple(tup) not in relation:
            return False
    return True


def almost_trivial_decomposition(relation, arity):
    """Coordinate partition witnessing almost triviality, or None.

    The candidate merges coordinates whose pairwise projection is the graph
    of a bijection (that linkage is an equivalence because bijection graphs
    compose); if any witnessing partition exists, the candidate is one, so
    verifying it decides the property.
    """
    relation = set(relation)
    if not relation:
        raise SchemaError("almost triviality is defined for nonempty relations")
    if arity > ALMOST_TRIVIAL_ARITY_GUARD:
        raise SizeGuardError(f"arity {arity} exceeds the decomposition guard")
    for t in relation:
        if len(t) != arity:
            raise SchemaError(f"tuple {t!r} has arity {len(t)}, expected {arity}")

    def bijective(i, j):
        pairs = {(t[i], t[j]) for t in relation}
        left = {p[0] for p in pairs}
        right = {p[1] for p in pairs}
        return len(pairs) == len(left) == len(right)

    parent = list(range(arity))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in combinations(range(arity), 2):
        if bijective(i, j):
            parent[find(i)] = find(j)
    groups = {}
    for i in range(arity):
        groups.setdefault(find(i), set()).add(i)
    blocks = tuple(frozenset(g) for g in sorted(groups.values(), key=min))
    if verify_almost_trivial(relation, arity, blocks):
        return blocks
    return None


# -- operation (de)serialization ----------------------------------------------


def operation_to_dict(op: FiniteOperation) -> dict:
    for e in op.base:
        if not isinstance(e, str) or "," in e:
            raise SchemaError("serializable operations need comma-free string ids")
    return {
        "arity": op.arity,
        "base": list(op.base),
        "table": {
            ",".join(args): op(*args)
            for args in _iproduct(op.base, repeat=op.arity)
        },
    }


def serialize_operation(op: FiniteOperation) -> str:
    return json.dumps(operation_to_dict(op), indent=2, ensure_ascii=False) + "\n"


def parse_operation(text: str) -> FiniteOperation:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("operation document must be a JSON object")
    for key in ("arity", "base", "table"):
        if key not in doc:
            raise SchemaError(f"operation document missing {key!r}")
    base = list(doc["base"])
    for e in base:
        if not isinstance(e, str) or not e or "," in e:
            raise SchemaError(f"bad base element {e!r}")
    table = {}
    for key, value in doc["table"].items():
        args = tuple(key.split(","))
        table[args] = value
    return FiniteOperation(doc["arity"], base, table)
