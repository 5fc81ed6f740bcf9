"""Finite relational signatures and structures.

A structure is a finite universe plus one finite relation per signature
symbol.  Universe elements are opaque hashable identifiers; their position
in the universe tuple is the total order that every "arbitrary" choice in
the toolkit falls back on, so constructions here keep element order
deterministic.  Structures are immutable after construction and safe to
share.
"""

from dataclasses import dataclass
from itertools import product as _iproduct
import json

from .errors import SchemaError, SimilarityError, SizeGuardError

PIN_PREFIX = "__pin_"

# Materialization guards.  The paper-level objects are unbounded; the
# artifact is not.
POWER_UNIVERSE_GUARD = 16          # max |B| for the power structure
PRODUCT_UNIVERSE_GUARD = 250_000   # max universe size for n-fold powers


@dataclass(frozen=True)
class Signature:
    """Ordered list of (name, arity) pairs with unique names, arity >= 1."""

    symbols: tuple

    def __post_init__(self):
        seen = set()
        for entry in self.symbols:
            name, arity = entry
            if name in seen:
                raise SchemaError(f"duplicate relation symbol {name!r}")
            if not isinstance(arity, int) or arity < 1:
                raise SchemaError(f"symbol {name!r} has invalid arity {arity!r}")
            seen.add(name)

    def names(self):
        return tuple(name for name, _ in self.symbols)

    def arity(self, name) -> int:
        for sym, arity in self.symbols:
            if sym == name:
                return arity
        raise SchemaError(f"unknown relation symbol {name!r}")

    def as_dict(self) -> dict:
        return {name: arity for name, arity in self.symbols}


class Structure:
    """Finite relational structure: signature, ordered universe, relations.

    ``relations`` maps every symbol name to a frozenset of tuples over the
    universe; symbols missing from the argument get the empty relation.
    """

    __slots__ = ("signature", "universe", "relations", "_index")

    def __init__(self, signature, universe, relations=None, validate=True):
        if not isinstance(signature, Signature):
            signature = Signature(tuple((n, a) for n, a in signature))
        self.signature = signature
        self.universe = tuple(universe)
        rels = {}
        relations = relations or {}
        for name, _ in signature.symbols:
            rels[name] = frozenset(tuple(t) for t in relations.get(name, ()))
        self.relations = rels
        self._index = {e: i for i, e in enumerate(self.universe)}
        if validate:
            self._validate(relations)

    def _validate(self, given_relations):
        if len(self._index) != len(self.universe):
            raise SchemaError("universe contains duplicate elements")
        for name in given_relations or {}:
            if name not in self.relations:
                raise SchemaError(f"relation for undeclared symbol {name!r}")
        for name, arity in self.signature.symbols:
            for t in self.relations[name]:
                if len(t) != arity:
                    raise SchemaError(
                        f"relation {name!r}: tuple {t!r} has arity {len(t)}, expected {arity}"
                    )
                for entry in t:
                    if entry not in self._index:
                        raise SchemaError(
                            f"relation {name!r}: tuple {t!r} mentions unknown element {entry!r}"
                        )

    # -- element order ----------------------------------------------------

    def index(self, element) -> int:
        try:
            return self._index[element]
        except KeyError:
            raise SchemaError(f"element {element!r} not in universe") from None

    def __contains__(self, element):
        return element in self._index

    def sorted_elements(self, elements):
        return sorted(elements, key=self._index.__getitem__)

    def sorted_tuples(self, name):
        idx = self._index
        return sorted(self.relations[name], key=lambda t: tuple(idx[e] for e in t))

    # -- equality ----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return (
            self.signature.as_dict() == other.signature.as_dict()
            and self.universe == other.universe
            and self.relations == other.relations
        )

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    __hash__ = None

    def __repr__(self):
        rel = ", ".join(f"{n}:{len(r)}" for n, r in self.relations.items())
        return f"Structure(|U|={len(self.universe)}, {rel})"


def similar(x: Structure, y: Structure) -> bool:
    return x.signature.as_dict() == y.signature.as_dict()


def require_similar(x: Structure, y: Structure) -> None:
    if not similar(x, y):
        raise SimilarityError(
            f"structures are not similar: {x.signature.as_dict()} vs {y.signature.as_dict()}"
        )


@dataclass
class Instance:
    """A CSP instance: a similar pair (lhs, rhs) with optional pinned elements."""

    lhs: Structure
    rhs: Structure
    pins: dict | None = None

    def __post_init__(self):
        require_similar(self.lhs, self.rhs)
        for a, b in (self.pins or {}).items():
            if a not in self.lhs:
                raise SchemaError(f"pin on unknown lhs element {a!r}")
            if b not in self.rhs:
                raise SchemaError(f"pin to unknown rhs element {b!r}")


def realize_pins(inst: Instance):
    """Turn instance pins into unary expansions of both sides.

    A pin a -> b becomes a fresh unary symbol holding {a} on the left and
    {b} on the right; the algorithms then see plain similar structures.
    """
    if not inst.pins:
        return inst.lhs, inst.rhs
    items = sorted(inst.pins.items(), key=lambda kv: inst.lhs.index(kv[0]))
    left = expand(inst.lhs, [{a} for a, _ in items])
    right = expand(inst.rhs, [{b} for _, b in items])
    return left, right


# -- constructions ---------------------------------------------------------


def product(x: Structure, y: Structure) -> Structure:
    """Binary product: universe of pairs, relations hold coordinatewise."""
    require_similar(x, y)
    universe = [(a, b) for a in x.universe for b in y.universe]
    rels = {}
    for name, _ in x.signature.symbols:
        tuples = set()
        for tx in x.relations[name]:
            for ty in y.relations[name]:
                tuples.add(tuple(zip(tx, ty)))
        rels[name] = tuples
    return Structure(x.signature, universe, rels)


def power(x: Structure, n: int) -> Structure:
    """n-fold product with flat n-tuple elements (not nested pairs)."""
    if n < 1:
        raise ValueError("power requires n >= 1")
    size = len(x.universe) ** n
    if size > PRODUCT_UNIVERSE_GUARD:
        raise SizeGuardError(f"power universe would have {size} elements")
    universe = list(_iproduct(x.universe, repeat=n))
    rels = {}
    for name, arity in x.signature.symbols:
        tuples = set()
        for rows in _iproduct(x.relations[name], repeat=n):
            # rows[j] is the tuple used in coordinate j; transpose it
            tuples.add(tuple(tuple(rows[j][i] for j in range(n)) for i in range(arity)))
        rels[name] = tuples
    return Structure(x.signature, universe, rels)


def induced_substructure(x: Structure, subset) -> Structure:
    """Substructure on ``subset``: relations restricted to tuples inside it."""
    keep = set(subset)
    if not keep:
        raise SchemaError("induced substructure needs a nonempty universe")
    for e in keep:
        if e not in x:
            raise SchemaError(f"element {e!r} not in universe")
    universe = [e for e in x.universe if e in keep]
    rels = {
        name: {t for t in x.relations[name] if all(e in keep for e in t)}
        for name, _ in x.signature.symbols
    }
    return Structure(x.signature, universe, rels)


def expand(x: Structure, sets) -> Structure:
    """Expansion [x, S1, ..., Sn]: one fresh unary symbol per given set.

    Fresh names use the reserved ``__pin_<k>`` prefix with the smallest free
    indices, so repeated expansion never collides.  Empty sets are legal;
    they make the expanded instance rejectable by arc consistency, which is
    exactly what the algorithms rely on.
    """
    sets = [frozenset(s) for s in sets]
    for s in sets:
        for e in s:
            if e not in x:
                raise SchemaError(f"expansion set mentions unknown element {e!r}")
    if not sets:
        return x
    taken = set(x.signature.names())
    names = []
    k = 0
    while len(names) < len(sets):
        cand = f"{PIN_PREFIX}{k}"
        if cand not in taken:
            names.append(cand)
        k += 1
    symbols = list(x.signature.symbols) + [(n, 1) for n in names]
    rels = dict(x.relations)
    for name, s in zip(names, sets):
        rels[name] = {(e,) for e in s}
    return Structure(Signature(tuple(symbols)), x.universe, rels)


# -- the power structure and its induced substructures ----------------------


def power_membership(relation, sets) -> bool:
    """Does the tuple of value sets belong to the relation's power lifting?

    Letting T be the restriction of the relation to the box S1 x ... x Sk,
    the answer is yes iff T is nonempty and projects onto every Si.  This is
    equivalent to the textbook form (some nonempty subset of the relation
    has exactly these projections): such a subset is contained in T, forcing
    T's projections up to the Si, and conversely T itself is a witness.
    """
    sets = [frozenset(s) for s in sets]
    k = len(sets)
    for s in sets:
        if not s:
            raise SchemaError("power membership is undefined for empty value sets")
    box = []
    for t in relation:
        if len(t) != k:
            raise SchemaError(
                f"arity mismatch: tuple {t!r} vs {k} value sets"
            )
        if all(t[i] in sets[i] for i in range(k)):
            box.append(t)
    if not box:
        return False
    for i in range(k):
        if {t[i] for t in box} != sets[i]:
            return False
    return True


def _nonempty_subsets(universe_tuple):
    """All nonempty frozensets over an ordered universe, in bitmask order."""
    n = len(universe_tuple)
    out = []
    for mask in range(1, 1 << n):
        out.append(frozenset(universe_tuple[i] for i in range(n) if (mask >> i) & 1))
    return out


def power_structure(b: Structure) -> Structure:
    """Structure on the nonempty value sets of ``b``.

    A relation holds on a tuple of value sets iff ``power_membership`` does;
    the subset-enumeration definition is kept as a test oracle because it
    blows up exponentially in relation size.
    """
    if len(b.universe) > POWER_UNIVERSE_GUARD:
        raise SizeGuardError(
            f"power structure guard: |B| = {len(b.universe)} > {POWER_UNIVERSE_GUARD}"
        )
    universe = _nonempty_subsets(b.universe)
    rels = {}
    for name, arity in b.signature.symbols:
        rel = b.relations[name]
        tuples = set()
        if rel:
            for cand in _iproduct(universe, repeat=arity):
                if power_membership(rel, cand):
                    tuples.add(cand)
        rels[name] = tuples
    return Structure(b.signature, universe, rels)


def sing_structure(b: Structure, n: int) -> Structure:
    """Substructure of the n-th power of the power structure on tuples with
    at least one singleton coordinate."""
    p = power_structure(b)
    size = len(p.universe) ** n
    if size > PRODUCT_UNIVERSE_GUARD:
        raise SizeGuardError(f"sing universe would have {size} elements")
    pn = power(p, n)
    keep = [e for e in pn.universe if any(len(s) == 1 for s in e)]
    return induced_substructure(pn, keep)


def unionsing_structure(b: Structure, n: int) -> Structure:
    """Substructure of the n-th power of the power structure on tuples whose
    union is covered by their singleton coordinates."""
    p = power_structure(b)
    size = len(p.universe) ** n
    if size > PRODUCT_UNIVERSE_GUARD:
        raise SizeGuardError(f"unionsing universe would have {size} elements")
    pn = power(p, n)
    keep = []
    for e in pn.universe:
        total = frozenset().union(*e)
        singles = frozenset().union(*(s for s in e if len(s) == 1)) if any(
            len(s) == 1 for s in e
        ) else frozenset()
        if total == singles:
            keep.append(e)
    return induced_substructure(pn, keep)


# -- labels and (de)serialization -------------------------------------------


def element_label(e) -> str:
    """Readable, deterministic name for universe elements of any construction."""
    if isinstance(e, str):
        return e
    if isinstance(e, frozenset):
        return "{" + ",".join(sorted(element_label(x) for x in e)) + "}"
    if isinstance(e, tuple):
        return "(" + ",".join(element_label(x) for x in e) + ")"
    return str(e)


def _check_identifier(name) -> str:
    if not isinstance(name, str) or not name:
        raise SchemaError(f"identifiers must be nonempty strings, got {name!r}")
    if name.startswith(PIN_PREFIX):
        raise SchemaError(f"identifier {name!r} uses the reserved prefix {PIN_PREFIX!r}")
    return name


def structure_to_dict(s: Structure) -> dict:
    sig = sorted(s.signature.symbols, key=lambda na: na[0])
    return {
        "signature": [{"name": n, "arity": a} for n, a in sig],
        "universe": [element_label(e) for e in s.universe],
        "relations": {
            n: [[element_label(e) for e in t] for t in s.sorted_tuples(n)]
            for n, _ in sig
        },
    }


def serialize_structure(s: Structure) -> str:
    return json.dumps(structure_to_dict(s), indent=2, ensure_ascii=False) + "\n"


def structure_from_dict(doc) -> Structure:
    if not isinstance(doc, dict):
        raise SchemaError("structure document must be a JSON object")
    for key in ("signature", "universe"):
        if key not in doc:
            raise SchemaError(f"structure document missing {key!r}")
    symbols = []
    for entry in doc["signature"]:
        if not isinstance(entry, dict) or "name" not in entry or "arity" not in entry:
            raise SchemaError(f"bad signature entry {entry!r}")
        symbols.append((_check_identifier(entry["name"]), entry["arity"]))
    universe = [_check_identifier(e) for e in doc["universe"]]
    relations = doc.get("relations", {})
    if not isinstance(relations, dict):
        raise SchemaError("relations must be an object")
    rels = {name: [tuple(t) for t in tuples] for name, tuples in relations.items()}
    return Structure(Signature(tuple(symbols)), universe, rels)


def parse_structure(text: str) -> Structure:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return structure_from_dict(doc)


def instance_to_dict(inst: Instance) -> dict:
    doc = {
        "lhs": structure_to_dict(inst.lhs),
        "rhs": structure_to_dict(inst.rhs),
    }
    if inst.pins:
        doc["pins"] = {
            element_label(a): element_label(b)
            for a, b in sorted(inst.pins.items(), key=lambda kv: inst.lhs.index(kv[0]))
        }
    return doc


def serialize_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2, ensure_ascii=False) + "\n"


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "lhs" not in doc or "rhs" not in doc:
        raise SchemaError("instance document needs 'lhs' and 'rhs'")
    lhs = structure_from_dict(doc["lhs"])
    rhs = structure_from_dict(doc["rhs"])
    pins = doc.get("pins") or None
    return Instance(lhs, rhs, pins)
