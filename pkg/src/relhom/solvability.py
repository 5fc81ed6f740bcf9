"""Deciders for which templates each consistency method solves.

The arc consistency and look-ahead deciders are exact: they reduce to one
homomorphism search.  The peek and singleton deciders quantify over all
level powers, so refutations at a checked level are definitive while
confirmations are only evidence up to the checked level and are labeled as
such; no finite level is known to suffice in general.
"""

from dataclasses import dataclass, field
from itertools import combinations, product as _iproduct
from math import comb

from .errors import BudgetError
from .homs import find_hom
from .rng import Xoshiro256StarStar
from .structures import (
    Instance,
    Structure,
    element_label,
    power_structure,
    product,
    realize_pins,
    sing_structure,
    unionsing_structure,
)

SOLVABLE = "solvable"
NOT_SOLVABLE = "not_solvable"
INCONCLUSIVE = "inconclusive"

K_STRATEGY_BUDGET = 500_000


@dataclass
class SolvabilityVerdict:
    method: str
    outcome: str
    level: int | None = None
    witness: dict | None = None
    level_witnesses: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        def label_map(mapping):
            return {element_label(a): element_label(b) for a, b in mapping.items()}

        return {
            "method": self.method,
            "outcome": self.outcome,
            "level": self.level,
            "witness": None if self.witness is None else label_map(self.witness),
            "level_witnesses": {
                str(n): label_map(h) for n, h in self.level_witnesses.items()
            },
        }


def ac_solves(b: Structure) -> SolvabilityVerdict:
    """Arc consistency solves the template iff its power structure maps
    homomorphically back into it.  Definitive both ways."""
    witness = find_hom(power_structure(b), b)
    if witness is None:
        return SolvabilityVerdict("ac", NOT_SOLVABLE)
    return SolvabilityVerdict("ac", SOLVABLE, witness=witness)


def laac_solves(b: Structure) -> SolvabilityVerdict:
    """Look-ahead arc consistency solves the template iff there is a
    homomorphism from (power structure x template) to the template that
    returns the pinned value on singletons.  Definitive both ways."""
    domain = product(power_structure(b), b)
    pins = {
        (frozenset({v}), w): v for v in b.universe for w in b.universe
    }
    witness = find_hom(domain, b, pins)
    if witness is None:
        return SolvabilityVerdict("laac", NOT_SOLVABLE)
    return SolvabilityVerdict("laac", SOLVABLE, witness=witness)


def _levels_decider(method, builder, b, n_max):
    verdict = SolvabilityVerdict(method, INCONCLUSIVE, level=n_max)
    for n in range(1, n_max + 1):
        witness = find_hom(builder(b, n), b)
        if witness is None:
            # refuted levels stay refuted at every higher level (duplicate a
            # coordinate to embed the lower level), so stop here
            return SolvabilityVerdict(method, NOT_SOLVABLE, level=n)
        verdict.level_witnesses[n] = witness
    return verdict


def pac_solves_up_to(b: Structure, n_max: int = 2) -> SolvabilityVerdict:
    """Check levels 1..n_max of the peek characterization (homomorphisms
    from the singleton-containing power substructures).  A missing level is
    a definitive refutation; all levels passing is bounded evidence only."""
    return _levels_decider("pac", sing_structure, b, n_max)


def sac_solves_up_to(b: Structure, n_max: int = 2) -> SolvabilityVerdict:
    """Same as the peek decider with the union-of-singletons substructures."""
    return _levels_decider("sac", unionsing_structure, b, n_max)


# -- k-strategies -------------------------------------------------------------


def _is_partial_hom(lhs, rhs, mapping):
    domain = set(mapping)
    for name, _ in lhs.signature.symbols:
        rel = rhs.relations[name]
        for t in lhs.relations[name]:
            if all(e in domain for e in t):
                if tuple(mapping[e] for e in t) not in rel:
                    return False
    return True


def has_k_strategy(inst: Instance, k: int, budget=K_STRATEGY_BUDGET, order_seed=None):
    """Greatest family of partial homomorphisms with domains of size <= k
    that is restriction-closed and extension-complete.

    Starts from every partial homomorphism and repeatedly deletes members
    whose extension fails, together with every member extending a deleted
    one (which keeps the family restriction-closed, so checking one-step
    extensions suffices).  The fixpoint is the union of all k-strategies and
    therefore independent of deletion order; ``order_seed`` shuffles the
    sweep so tests can assert exactly that.  Returns (nonempty?, survivors)
    with members encoded as frozensets of (element, value) pairs.
    """
    if k < 2:
        raise ValueError("k-strategies are defined for k >= 2")
    lhs, rhs = realize_pins(inst)
    n = len(lhs.universe)
    count = sum(comb(n, d) * len(rhs.universe) ** d for d in range(0, min(k, n) + 1))
    if count > budget:
        raise BudgetError(f"{count} candidate partial maps exceed budget {budget}")
    members = set()
    for d in range(0, min(k, n) + 1):
        for dom in combinations(lhs.universe, d):
            for values in _iproduct(rhs.universe, repeat=d):
                mapping = dict(zip(dom, values))
                if _is_partial_hom(lhs, rhs, mapping):
                    members.add(frozenset(mapping.items()))
    aidx = {e: i for i, e in enumerate(lhs.universe)}
    bidx = {e: i for i, e in enumerate(rhs.universe)}
    sweep = sorted(members, key=lambda f: (len(f), sorted((aidx[a], bidx[b]) for a, b in f)))
    if order_seed is not None:
        Xoshiro256StarStar(order_seed).shuffle(sweep)
    elements = list(lhs.universe)
    changed = True
    while changed:
        changed = False
        for f in sweep:
            if f not in members or len(f) >= k:
                continue
            fdom = {a for a, _ in f}
            for a in elements:
                if a in fdom:
                    continue
                if not any(f | {(a, b)} in members for b in rhs.universe):
                    members = {g for g in members if not f <= g}
                    changed = True
                    break
    return bool(members), frozenset(members)


def strategy_relation(members, elements) -> frozenset:
    """Tuples realized over the listed elements by strategy members whose
    domain is exactly that element set."""
    wanted = frozenset(elements)
    out = set()
    for f in members:
        mapping = dict(f)
        if frozenset(mapping) == wanted:
            out.add(tuple(mapping[a] for a in elements))
    return frozenset(out)
