"""Catalog of the benchmark structures and operation tables, plus seeded
random instance/template generators.

Builders are deterministic and self-check the defining cardinalities and a
few membership facts at construction time.  Generators draw from the
seed-portable RNG in :mod:`relhom.rng`; planted instances keep the witness
assignment so soundness tests can reuse it.
"""

from itertools import product as _iproduct

from .algebra import FiniteOperation, is_polymorphism
from .errors import ToolkitError, UnknownFixtureError
from .rng import Xoshiro256StarStar
from .structures import Instance, Signature, Structure


def _check(cond, name, what):
    if not cond:
        raise ToolkitError(f"fixture {name!r} failed its self-check: {what}")


def _binary_all(universe):
    return set(_iproduct(universe, repeat=2))


def _ternary_all(universe):
    return set(_iproduct(universe, repeat=3))


def _laac_not_ac() -> Structure:
    u = ("0", "1")
    rels = {
        "U0": {("0",)},
        "U1": {("1",)},
        "R00": _binary_all(u) - {("0", "0")},
        "R11": _binary_all(u) - {("1", "1")},
    }
    s = Structure(
        Signature((("U0", 1), ("U1", 1), ("R00", 2), ("R11", 2))), u, rels
    )
    _check(len(s.relations["R00"]) == 3, "laac_not_ac", "|R00| must be 3")
    _check(("0", "1") in s.relations["R11"], "laac_not_ac", "(0,1) in R11")
    return s


def _ac_not_laac() -> Structure:
    u = ("0", "1")
    rels = {
        "R": _ternary_all(u) - {("0", "1", "1")},
        "S": _ternary_all(u) - {("1", "0", "0")},
    }
    s = Structure(Signature((("R", 3), ("S", 3))), u, rels)
    _check(len(s.relations["R"]) == 7, "ac_not_laac", "|R| must be 7")
    _check(len(s.relations["S"]) == 7, "ac_not_laac", "|S| must be 7")
    return s


def _pac_not_laac() -> Structure:
    u = ("0", "1", "2")
    r1 = {(a, b) for a in ("0", "1") for b in u} - {("0", "0")}
    rels = {
        "U0": {("0",)},
        "U1": {("1",)},
        "U2": {("2",)},
        "R1": r1,
        "R2": {("0", "0"), ("1", "2"), ("2", "1")},
    }
    s = Structure(
        Signature((("U0", 1), ("U1", 1), ("U2", 1), ("R1", 2), ("R2", 2))), u, rels
    )
    _check(len(s.relations["R1"]) == 5, "pac_not_laac", "|R1| must be 5")
    return s


def _sac_not_pac() -> Structure:
    u = ("0", "1", "2", "3")
    rels = {
        "U0": {("0",)},
        "U1": {("1",)},
        "U2": {("2",)},
        "U3": {("3",)},
        "R1": _binary_all(u) - {("0", "0")},
        "R2": {("1", "2"), ("2", "3"), ("3", "1"), ("0", "0")},
    }
    s = Structure(
        Signature(
            (("U0", 1), ("U1", 1), ("U2", 1), ("U3", 1), ("R1", 2), ("R2", 2))
        ),
        u,
        rels,
    )
    _check(len(s.relations["R1"]) == 15, "sac_not_pac", "|R1| must be 15")
    _check(
        is_polymorphism(s, _twosem_table()),
        "sac_not_pac",
        "companion operation must be a polymorphism",
    )
    return s


def _twosem_table() -> FiniteOperation:
    rows = {
        "0": ("0", "1", "2", "3"),
        "1": ("1", "1", "2", "1"),
        "2": ("2", "2", "2", "3"),
        "3": ("3", "1", "3", "3"),
    }
    base = ("0", "1", "2", "3")
    table = {(x, y): rows[x][base.index(y)] for x in base for y in base}
    op = FiniteOperation(2, base, table)
    _check(op("1", "2") == "2", "twosem_table", "1*2 = 2")
    _check(op("2", "3") == "3", "twosem_table", "2*3 = 3")
    _check(op("3", "1") == "1", "twosem_table", "3*1 = 1")
    _check(all(op("0", a) == a for a in base), "twosem_table", "0 is neutral")
    return op


def _boolean_median() -> FiniteOperation:
    base = ("0", "1")

    def med(x, y, z):
        return "1" if (x, y, z).count("1") >= 2 else "0"

    return FiniteOperation.from_function(3, base, med)


def _boolean_median_language() -> Structure:
    """All 16 binary relations over {0, 1} plus both constants; closed under
    the boolean median."""
    u = ("0", "1")
    order = [("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")]
    symbols = [("U0", 1), ("U1", 1)]
    rels = {"U0": {("0",)}, "U1": {("1",)}}
    for mask in range(16):
        name = f"R{mask}"
        symbols.append((name, 2))
        rels[name] = {order[i] for i in range(4) if (mask >> i) & 1}
    s = Structure(Signature(tuple(symbols)), u, rels)
    _check(
        is_polymorphism(s, _boolean_median()),
        "boolean_median_language",
        "median must be a polymorphism",
    )
    return s


_STRUCTURES = {
    "laac_not_ac": _laac_not_ac,
    "ac_not_laac": _ac_not_laac,
    "pac_not_laac": _pac_not_laac,
    "sac_not_pac": _sac_not_pac,
    "boolean_median_language": _boolean_median_language,
}

_OPERATIONS = {
    "twosem_table": _twosem_table,
    "sac_not_pac_op": _twosem_table,
    "boolean_median": _boolean_median,
}


def structure_names():
    return tuple(sorted(_STRUCTURES))


def operation_names():
    return tuple(sorted(_OPERATIONS))


def build(name: str):
    """Build a catalog structure or operation by name."""
    if name in _STRUCTURES:
        return _STRUCTURES[name]()
    if name in _OPERATIONS:
        return _OPERATIONS[name]()
    raise UnknownFixtureError(
        f"unknown fixture {name!r}; known: {', '.join(structure_names() + operation_names())}"
    )


# -- random generation ---------------------------------------------------------


def random_template(universe_size, signature, tuples, seed) -> Structure:
    """Random right-hand structure: given symbols, uniform random tuples."""
    if universe_size < 1 or tuples < 0:
        raise ValueError("need a positive universe and nonnegative tuple count")
    rng = Xoshiro256StarStar(seed)
    universe = tuple(str(i) for i in range(universe_size))
    sig = Signature(tuple(signature))
    rels = {name: set() for name, _ in sig.symbols}
    names = [name for name, _ in sig.symbols]
    arities = dict(sig.symbols)
    for _ in range(tuples):
        name = rng.choice(names)
        rels[name].add(tuple(rng.choice(universe) for _ in range(arities[name])))
    return Structure(sig, universe, rels)


def random_instance(rhs: Structure, elements, tuples, seed, planted=False):
    """Random instance against a fixed template.

    Unplanted: symbols and left tuples uniform.  Planted: an assignment is
    drawn first and only tuples it satisfies are emitted, drawn uniformly
    per symbol among the satisfied ones; symbols with nothing satisfiable
    are simply never picked (a template may carry empty relations on
    purpose), and generation fails only when no symbol is usable at all.

    Returns (instance, planted assignment or None).
    """
    if elements < 1 or tuples < 0:
        raise ValueError("need a positive element count and nonnegative tuples")
    rng = Xoshiro256StarStar(seed)
    universe = tuple(f"a{i}" for i in range(elements))
    assignment = None
    if planted:
        assignment = {a: rng.choice(rhs.universe) for a in universe}
    sig = rhs.signature
    arities = dict(sig.symbols)
    rels = {name: set() for name, _ in sig.symbols}
    if planted:
        candidates = {}
        for name, arity in sig.symbols:
            rel = rhs.relations[name]
            good = [
                t
                for t in _iproduct(universe, repeat=arity)
                if tuple(assignment[e] for e in t) in rel
            ]
            if good:
                candidates[name] = good
        usable = sorted(candidates)
        if tuples > 0 and not usable:
            raise ValueError(
                "planted generation infeasible: no relation admits a satisfied tuple"
            )
        for _ in range(tuples):
            name = rng.choice(usable)
            rels[name].add(rng.choice(candidates[name]))
    else:
        names = [name for name, _ in sig.symbols]
        for _ in range(tuples):
            name = rng.choice(names)
            rels[name].add(tuple(rng.choice(universe) for _ in range(arities[name])))
    lhs = Structure(sig, universe, rels)
    return Instance(lhs, rhs), assignment
