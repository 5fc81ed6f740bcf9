"""The consistency algorithms: arc consistency and its three extensions.

All four algorithms narrow per-element value sets.  They share one
propagation engine that indexes elements and values by universe position and
stores value sets as bitmasks; every "arbitrary" choice in the algorithm
boxes is made deterministic by universe order.

Narrowing facts used throughout (all standard greatest-fixpoint reasoning):

* the final sets of arc consistency do not depend on processing order;
* running arc consistency from the fixpoint of a weaker set vector and then
  adding a pin yields exactly the fixpoint of the pinned instance, which is
  why pinned re-runs can start from an inherited state instead of scratch.

The literal full-sweep form of the arc consistency box is kept alongside
the worklist form as an oracle.
"""

from collections import deque
from dataclasses import dataclass, field
from itertools import product as _iproduct

from .errors import SchemaError
from .rng import Xoshiro256StarStar
from .structures import Instance, element_label, realize_pins, require_similar

REJECT = "reject"
UNKNOWN = "unknown"
ACCEPT = "accept"

TRACE_LIMIT = 100_000


@dataclass
class ConsistencyOutcome:
    """Result of one algorithm run: verdict, final sets, optional extras.

    ``assignment`` is only ever produced by look-ahead arc consistency.
    """

    verdict: str
    sets: dict
    assignment: dict | None = None
    trace: list | None = None

    def to_json_dict(self) -> dict:
        doc = {
            "verdict": self.verdict,
            "sets": {
                element_label(a): sorted(element_label(b) for b in vals)
                for a, vals in self.sets.items()
            },
            "assignment": None
            if self.assignment is None
            else {element_label(a): element_label(b) for a, b in self.assignment.items()},
        }
        if self.trace is not None:
            doc["trace"] = [
                {"element": element_label(a), "value": element_label(b), "cause": cause}
                for a, b, cause in self.trace
            ]
        return doc


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


class Engine:
    """Propagation core for one similar pair: domains are bitmasks over rhs."""

    def __init__(self, lhs, rhs):
        require_similar(lhs, rhs)
        self.lhs = lhs
        self.rhs = rhs
        self.n = len(lhs.universe)
        self.nb = len(rhs.universe)
        self.full = (1 << self.nb) - 1
        aidx = {e: i for i, e in enumerate(lhs.universe)}
        bidx = {e: i for i, e in enumerate(rhs.universe)}
        constraints = []
        for name, _ in lhs.signature.symbols:
            btuples = tuple(
                sorted(tuple(bidx[e] for e in t) for t in rhs.relations[name])
            )
            for at in lhs.sorted_tuples(name):
                scope = tuple(aidx[e] for e in at)
                constraints.append((scope, btuples, name, at))
        self.constraints = constraints
        touch = [[] for _ in range(self.n)]
        for ci, (scope, _bt, _n, _t) in enumerate(constraints):
            for v in set(scope):
                touch[v].append(ci)
        self.touch = touch

    def full_domains(self) -> list:
        return [self.full] * self.n

    def propagate(self, doms, seeds=None, stop_on_empty=False, trace=None):
        """Worklist narrowing to the greatest fixpoint below ``doms``.

        ``seeds`` restricts the initial queue to the given constraint ids;
        callers may do that only when every other constraint is already
        stable under ``doms``.  Returns True iff no domain is empty at the
        end (or at the first new empty when ``stop_on_empty``).
        """
        constraints = self.constraints
        touch = self.touch
        if seeds is None:
            seeds = range(len(constraints))
        queue = deque(seeds)
        inq = [False] * len(constraints)
        for ci in queue:
            inq[ci] = True
        while queue:
            ci = queue.popleft()
            inq[ci] = False
            scope, btuples, name, at = constraints[ci]
            k = len(scope)
            projs = [0] * k
            for t in btuples:
                for i in range(k):
                    if not (doms[scope[i]] >> t[i]) & 1:
                        break
                else:
                    for i in range(k):
                        projs[i] |= 1 << t[i]
            for i in range(k):
                v = scope[i]
                nd = doms[v] & projs[i]
                if nd != doms[v]:
                    if trace is not None and len(trace) < TRACE_LIMIT:
                        for bi in _bits(doms[v] & ~nd):
                            trace.append(
                                (self.lhs.universe[v], self.rhs.universe[bi], f"{name}{at}")
                            )
                    doms[v] = nd
                    if nd == 0 and stop_on_empty:
                        return False
                    for cj in touch[v]:
                        if cj != ci and not inq[cj]:
                            inq[cj] = True
                            queue.append(cj)
        return all(d != 0 for d in doms)

    def decode(self, doms) -> dict:
        uni = self.rhs.universe
        return {
            a: frozenset(uni[bi] for bi in _bits(doms[i]))
            for i, a in enumerate(self.lhs.universe)
        }

    def encode_sets(self, sets) -> list:
        bidx = {e: i for i, e in enumerate(self.rhs.universe)}
        doms = []
        for a in self.lhs.universe:
            mask = 0
            for b in sets[a]:
                mask |= 1 << bidx[b]
            doms.append(mask)
        return doms


def arc_consistency(inst: Instance, trace=False, order_seed=None) -> ConsistencyOutcome:
    """Arc consistency: narrow every element's set to the projections of its
    constraints until stable; reject iff some set empties.

    The computed sets are the greatest fixpoint of the narrowing step, so
    they are independent of processing order; ``order_seed`` shuffles the
    worklist seeding to let tests exercise exactly that.
    """
    lhs, rhs = realize_pins(inst)
    eng = Engine(lhs, rhs)
    doms = eng.full_domains()
    tr = [] if trace else None
    seeds = list(range(len(eng.constraints)))
    if order_seed is not None:
        Xoshiro256StarStar(order_seed).shuffle(seeds)
    ok = eng.propagate(doms, seeds=seeds, trace=tr)
    return ConsistencyOutcome(UNKNOWN if ok else REJECT, eng.decode(doms), trace=tr)


def arc_consistency_fullsweep(inst: Instance, order_seed=None) -> ConsistencyOutcome:
    """Literal re-sweep form of the arc consistency box (test oracle).

    Sweeps every (relation, tuple, index) unit, narrowing one coordinate at
    a time, until a full sweep changes nothing.
    """
    lhs, rhs = realize_pins(inst)
    sets = {a: set(rhs.universe) for a in lhs.universe}
    units = []
    for name, arity in lhs.signature.symbols:
        for at in lhs.sorted_tuples(name):
            for i in range(arity):
                units.append((name, at, i))
    if order_seed is not None:
        Xoshiro256StarStar(order_seed).shuffle(units)
    changed = True
    while changed:
        changed = False
        for name, at, i in units:
            rel = rhs.relations[name]
            box = [t for t in rel if all(t[j] in sets[at[j]] for j in range(len(at)))]
            proj = {t[i] for t in box}
            if proj != sets[at[i]]:
                sets[at[i]] = proj
                changed = True
    verdict = REJECT if any(not s for s in sets.values()) else UNKNOWN
    return ConsistencyOutcome(verdict, {a: frozenset(s) for a, s in sets.items()})


def laac(inst: Instance) -> ConsistencyOutcome:
    """Look-ahead arc consistency: set one element at a time, keeping values
    whose pinned arc consistency check passes; accept with the assignment
    built, or answer "?" when some element has no workable value.

    Elements are processed in universe order and candidate values tried in
    universe order (the box leaves both choices arbitrary).  An accepted
    assignment is always a homomorphism: the last check pins every element
    to a singleton, and a nonempty all-singleton arc consistency fixpoint
    satisfies every tuple.
    """
    lhs, rhs = realize_pins(inst)
    eng = Engine(lhs, rhs)
    state = eng.full_domains()
    eng.propagate(state)
    sets = eng.full_domains()
    chosen = []
    for i in range(eng.n):
        survivors = 0
        first_state = None
        for bi in range(eng.nb):
            trial = state.copy()
            trial[i] = state[i] & (1 << bi)
            ok = trial[i] != 0 and eng.propagate(
                trial, seeds=eng.touch[i], stop_on_empty=True
            )
            if ok:
                survivors |= 1 << bi
                if first_state is None:
                    first_state = trial
        sets[i] = survivors
        if survivors == 0:
            return ConsistencyOutcome(UNKNOWN, eng.decode(sets))
        chosen.append(next(_bits(survivors)))
        state = first_state
    assignment = {
        lhs.universe[i]: rhs.universe[bi] for i, bi in enumerate(chosen)
    }
    return ConsistencyOutcome(ACCEPT, eng.decode(sets), assignment=assignment)


def pac(inst: Instance, parallel=False) -> ConsistencyOutcome:
    """Peek arc consistency: keep b in S_a iff arc consistency passes on the
    instance with a pinned to b; reject iff some S_a empties.

    The |A| x |B| pinned checks are independent; ``parallel`` dispatches
    them on a thread pool with bitwise-identical results.
    """
    lhs, rhs = realize_pins(inst)
    eng = Engine(lhs, rhs)
    root = eng.full_domains()
    eng.propagate(root)

    def check(i, bi):
        trial = root.copy()
        trial[i] = root[i] & (1 << bi)
        return trial[i] != 0 and eng.propagate(
            trial, seeds=eng.touch[i], stop_on_empty=True
        )

    pairs = [(i, bi) for i in range(eng.n) for bi in range(eng.nb)]
    if parallel:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor() as pool:
            results = dict(zip(pairs, pool.map(lambda p: check(*p), pairs)))
    else:
        results = {p: check(*p) for p in pairs}
    sets = [0] * eng.n
    for (i, bi), ok in results.items():
        if ok:
            sets[i] |= 1 << bi
    verdict = REJECT if any(m == 0 for m in sets) else UNKNOWN
    return ConsistencyOutcome(verdict, eng.decode(sets))


def _sac_fixpoint(eng: Engine, sets: list, trace=None) -> list:
    """Shared singleton-test loop: repeatedly drop b from S_a when arc
    consistency rejects under the current sets as unary pins plus {b} on a.

    ``sets`` is mutated to the final outer sets and also returned.  The
    inner check starts from the propagation fixpoint of the current sets,
    which equals the fixpoint of the literally expanded instance.
    """
    root = sets.copy()
    eng.propagate(root)
    changed = True
    while changed:
        changed = False
        for i in range(eng.n):
            for bi in _bits(sets[i]):
                trial = root.copy()
                trial[i] = root[i] & (1 << bi)
                ok = trial[i] != 0 and eng.propagate(
                    trial, seeds=eng.touch[i], stop_on_empty=True
                )
                if not ok:
                    sets[i] &= ~(1 << bi)
                    changed = True
                    if trace is not None and len(trace) < TRACE_LIMIT:
                        trace.append(
                            (eng.lhs.universe[i], eng.rhs.universe[bi], "singleton check")
                        )
                    root[i] &= sets[i]
                    eng.propagate(root, seeds=eng.touch[i])
    return sets


def sac(inst: Instance, trace=False) -> ConsistencyOutcome:
    """Singleton arc consistency: iterate the pinned checks of the box in
    (element order, value order) until the sets stabilize; reject iff some
    set empties."""
    lhs, rhs = realize_pins(inst)
    eng = Engine(lhs, rhs)
    tr = [] if trace else None
    sets = _sac_fixpoint(eng, eng.full_domains(), trace=tr)
    verdict = REJECT if any(m == 0 for m in sets) else UNKNOWN
    return ConsistencyOutcome(verdict, eng.decode(sets), trace=tr)


# -- set systems and strategy checkers ---------------------------------------


def _check_set_system(lhs, rhs, system) -> None:
    if set(system) != set(lhs.universe):
        raise SchemaError("set system must be keyed by exactly the lhs universe")
    for a, vals in system.items():
        if not vals:
            raise SchemaError(f"set system value for {a!r} is empty")
        for b in vals:
            if b not in rhs:
                raise SchemaError(f"set system value {b!r} not in rhs universe")


def _edge_tables(lhs, rhs):
    """Pattern-edge data: for every (symbol, i, j) the realized lhs element
    pairs, and per rhs value the supported partner values."""
    apairs = {}
    for name, arity in lhs.signature.symbols:
        for t in lhs.relations[name]:
            for i in range(arity):
                for j in range(arity):
                    apairs.setdefault((name, i, j), set()).add((t[i], t[j]))
    btrans = {}
    for name, i, j in apairs:
        table = {}
        for t in rhs.relations[name]:
            table.setdefault(t[i], set()).add(t[j])
        btrans[(name, i, j)] = table
    return apairs, btrans


def is_weak_strategy(inst: Instance, system) -> bool:
    """Every length-2 pattern step from a kept value reaches some kept value.

    Supports are read literally: only the pattern's two endpoint values must
    lie inside the system, not the other coordinates of the witnessing rhs
    tuple.  (Requiring whole witness tuples inside the system would be a
    strictly stronger check; the algorithms here satisfy both.)
    """
    lhs, rhs = realize_pins(inst)
    _check_set_system(lhs, rhs, system)
    apairs, btrans = _edge_tables(lhs, rhs)
    for edge, pairs in apairs.items():
        table = btrans[edge]
        for a1, a2 in pairs:
            targets = system[a2]
            for b1 in system[a1]:
                support = table.get(b1)
                if not support or not (support & set(targets)):
                    return False
    return True


def is_strong_strategy(inst: Instance, system) -> bool:
    """Every cycle through (a, b) can be realized inside the system returning
    to b.

    Decided by determinized reachability: from (a, {b}), walk the labeled
    pattern edges tracking the set of values reachable inside the system;
    the property fails iff some walk returns to a with a value set missing
    b.  Edge labels are invertible (swap the two indices), so walks that die
    out are themselves returnable failures.
    """
    lhs, rhs = realize_pins(inst)
    _check_set_system(lhs, rhs, system)
    apairs, btrans = _edge_tables(lhs, rhs)
    bidx = {e: i for i, e in enumerate(rhs.universe)}
    hmask = {
        a: sum(1 << bidx[b] for b in vals) for a, vals in system.items()
    }
    adj = {a: [] for a in lhs.universe}
    transmask = {}
    for edge, pairs in apairs.items():
        table = btrans[edge]
        transmask[edge] = {
            b1: sum(1 << bidx[b2] for b2 in b2s) for b1, b2s in table.items()
        }
        for a1, a2 in pairs:
            adj[a1].append((edge, a2))
    bit_of = {b: 1 << bidx[b] for b in rhs.universe}
    for a in lhs.universe:
        for b in system[a]:
            want = bit_of[b]
            start = (a, want)
            seen = {start}
            stack = [start]
            while stack:
                x, zmask = stack.pop()
                for edge, y in adj[x]:
                    table = transmask[edge]
                    z2 = 0
                    rest = zmask
                    i = 0
                    while rest:
                        if rest & 1:
                            z2 |= table.get(rhs.universe[i], 0)
                        rest >>= 1
                        i += 1
                    z2 &= hmask[y]
                    if y == a and not (z2 & want):
                        return False
                    state = (y, z2)
                    if state not in seen:
                        seen.add(state)
                        stack.append(state)
    return True
