"""Homomorphism testing, search and enumeration between similar structures.

``find_hom`` is the workhorse search (backtracking with arc consistency
propagation at every node plus a singleton-test preprocessing pass);
``enumerate_homs`` is a deliberately naive full enumeration kept as the
oracle the search is validated against, so the two share no machinery.
"""

from itertools import product as _iproduct

from .consistency import Engine, _bits, _sac_fixpoint
from .errors import BudgetError
from .structures import Structure, require_similar

ENUMERATION_BUDGET = 10_000_000


def is_hom(lhs: Structure, rhs: Structure, mapping) -> bool:
    """Is ``mapping`` a homomorphism?  Requires a total map into the rhs."""
    require_similar(lhs, rhs)
    for a in lhs.universe:
        if a not in mapping:
            raise ValueError(f"mapping is not total: missing {a!r}")
        if mapping[a] not in rhs:
            raise ValueError(f"mapping sends {a!r} outside the rhs universe")
    for name, _ in lhs.signature.symbols:
        rel = rhs.relations[name]
        for t in lhs.relations[name]:
            if tuple(mapping[e] for e in t) not in rel:
                return False
    return True


def _check_pins(lhs, rhs, pins):
    pins = pins or {}
    for a, b in pins.items():
        if a not in lhs:
            raise ValueError(f"pin on unknown lhs element {a!r}")
        if b not in rhs:
            raise ValueError(f"pin to unknown rhs element {b!r}")
    return pins


def find_hom(lhs: Structure, rhs: Structure, pins=None):
    """First homomorphism extending ``pins`` in lexicographic branch order
    (elements in universe order, values in universe order), or None.

    Search is backtracking with propagation: domains start from the pinned
    arc consistency fixpoint, a singleton-test pass prunes them further
    (removals of that kind never touch values used by any homomorphism, so
    the first surviving solution is still the lexicographically least), and
    each tentative assignment re-propagates.  A node whose propagation
    leaves every domain a singleton is a solution.
    """
    require_similar(lhs, rhs)
    pins = _check_pins(lhs, rhs, pins)
    eng = Engine(lhs, rhs)
    bidx = {e: i for i, e in enumerate(rhs.universe)}
    doms = eng.full_domains()
    for a, b in pins.items():
        doms[lhs.index(a)] &= 1 << bidx[b]
    if not eng.propagate(doms):
        return None
    _sac_fixpoint(eng, doms)
    if any(d == 0 for d in doms):
        return None
    if not eng.propagate(doms):
        return None

    def dfs(state):
        var = -1
        for i in range(eng.n):
            if state[i] & (state[i] - 1):
                var = i
                break
        if var < 0:
            return state
        for bi in _bits(state[var]):
            trial = state.copy()
            trial[var] = 1 << bi
            if eng.propagate(trial, seeds=eng.touch[var], stop_on_empty=True):
                found = dfs(trial)
                if found is not None:
                    return found
        return None

    solution = dfs(doms)
    if solution is None:
        return None
    return {
        lhs.universe[i]: rhs.universe[next(_bits(solution[i]))]
        for i in range(eng.n)
    }


def enumerate_homs(lhs: Structure, rhs: Structure, pins=None, budget=ENUMERATION_BUDGET):
    """All homomorphisms extending ``pins``, in lexicographic order.

    Naive by design: every candidate map is generated and filtered through
    ``is_hom``, so this cannot share bugs with the search path.  Guarded by
    a candidate-count budget.
    """
    require_similar(lhs, rhs)
    pins = _check_pins(lhs, rhs, pins)
    free = [a for a in lhs.universe if a not in pins]
    count = len(rhs.universe) ** len(free) if free else 1
    if count > budget:
        raise BudgetError(f"{count} candidate maps exceed the budget of {budget}")
    out = []
    for values in _iproduct(rhs.universe, repeat=len(free)):
        mapping = dict(pins)
        mapping.update(zip(free, values))
        if is_hom(lhs, rhs, mapping):
            out.append(mapping)
    return out


def has_all_constants(b: Structure) -> bool:
    """Does every element carry its own singleton unary relation?"""
    singletons = set()
    for name, arity in b.signature.symbols:
        if arity == 1 and len(b.relations[name]) == 1:
            (t,) = b.relations[name]
            singletons.add(t[0])
    return all(e in singletons for e in b.universe)
