"""Selective filtration: extract a finite MGrz countermodel by choosing
strongly maximal witness points.

The input is a finite MGrz model refuting ``phi``.  Points of the output are
copies of selected worlds; every copy remembers its origin, the set it was
chosen from (its origin is strongly maximal there) and why it was chosen.
Rounds run an exists-step, a diamond-step (horizontal pass, then vertical
pass) and commutativity repair until a round changes nothing.

Box and forall subformulas are handled through their duals: ``[]psi`` in ``S``
asks for a diamond witness of ``~psi`` wherever it fails, and likewise ``A``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import bits
from .errors import BoundViolation, FrameClassError, InvariantViolation, NotRefuted
from .frames import MKFrame, e_skeleton, in_class, max_set, smax_set
from .semantics import Model, extensions
from .syntax import Box, Dia, Ex, Fa, Formula, Not, letters, render_formula, subformula_closure

SATURATION = 1 << 64


# --------------------------------------------------------------------------
# witness bookkeeping


@dataclass(frozen=True)
class WitnessFormula:
    """A formula of the shape ``<>psi`` / ``E psi`` whose failure at a point
    needs a witness for ``target``.  ``virtual`` marks duals of box/forall
    members of ``S`` that are not themselves in ``S``."""

    formula: Formula
    target: Formula
    virtual: bool


def witness_formulas(S: tuple[Formula, ...]) -> tuple[list[WitnessFormula], list[WitnessFormula]]:
    """The exists-type and diamond-type formulas in ``S`` order."""
    ex, dia = [], []
    for g in S:
        if isinstance(g, Ex):
            ex.append(WitnessFormula(g, g.sub, False))
        elif isinstance(g, Fa):
            ex.append(WitnessFormula(Ex(Not(g.sub)), Not(g.sub), True))
        elif isinstance(g, Dia):
            dia.append(WitnessFormula(g, g.sub, False))
        elif isinstance(g, Box):
            dia.append(WitnessFormula(Dia(Not(g.sub)), Not(g.sub), True))
    return ex, dia


@dataclass
class WitnessSets:
    ex: list[list[WitnessFormula]]
    dia: list[list[WitnessFormula]]


def _all_extensions(M: Model, S: tuple[Formula, ...]) -> dict[Formula, int]:
    ext: dict[Formula, int] = {}
    ex, dia = witness_formulas(S)
    for g in list(S) + [w.formula for w in ex + dia]:
        if g not in ext:
            ext.update(extensions(M, g))
    return ext


def witness_sets(M: Model, S: tuple[Formula, ...]) -> WitnessSets:
    """``W_ex[x]``: exists-type formulas true at ``x`` whose body fails at ``x``;
    ``W_dia[x]`` likewise for diamonds."""
    ext = _all_extensions(M, S)
    ex, dia = witness_formulas(S)

    def pick(forms: list[WitnessFormula], x: int) -> list[WitnessFormula]:
        return [w for w in forms if ext[w.formula] >> x & 1 and not ext[w.target] >> x & 1]

    n = M.frame.n
    return WitnessSets([pick(ex, x) for x in range(n)], [pick(dia, x) for x in range(n)])


def sim_s(M: Model, S: tuple[Formula, ...]) -> list[int]:
    """Classes of worlds agreeing on every member of ``S``, as bitmasks."""
    ext = _all_extensions(M, S)
    classes: dict[tuple[bool, ...], int] = {}
    for x in range(M.frame.n):
        key = tuple(bool(ext[g] >> x & 1) for g in S)
        classes[key] = classes.get(key, 0) | (1 << x)
    return sorted(classes.values(), key=bits.lowest)


# --------------------------------------------------------------------------
# state


KINDS = ("root", "exists_witness", "dia_horizontal", "dia_vertical", "commutativity")

_TAGS = {
    "root": "strongly maximal refutation point",
    "exists_witness": "exists-witness in the same cluster",
    "dia_horizontal": "horizontal diamond witness",
    "dia_vertical": "vertical diamond witness",
    "commutativity": "commutativity repair",
}


@dataclass(frozen=True)
class SelectedPoint:
    id: int
    origin: int
    selection_clopen: int
    kind: str


@dataclass(frozen=True)
class CrossEdge:
    source: int
    target: int
    formula: Formula
    A: int
    kind: str  # "vertical" or "commutativity"


class FiltrationState:
    """Points, the relations ``Rk`` (reflexive-transitive, rows over ids) and
    ``Ek`` (cluster label per id), plus provenance of cross-cluster edges."""

    def __init__(self, M: Model, phi: Formula):
        self.model = M
        self.frame = M.frame
        self.phi = phi
        self.S = subformula_closure(phi)
        self.ext = _all_extensions(M, self.S)
        self.witnesses = witness_sets(M, self.S)
        self.points: list[SelectedPoint] = []
        self.by_origin: dict[int, int] = {}
        self.rk: list[int] = []
        self.cluster: list[int] = []
        self.cross_edges: list[CrossEdge] = []
        self.log: list[str] = []
        self.round = 0
        self.version = 0
        self._A_cache: dict[tuple[int, Formula], int] = {}

    # -- queries

    def truth(self, g: Formula) -> int:
        return self.ext[g]

    def ek(self, i: int) -> int:
        c = self.cluster[i]
        return bits.from_iter(j for j, cj in enumerate(self.cluster) if cj == c)

    def origins(self, ids: int) -> int:
        return bits.from_iter(self.points[i].origin for i in bits.bits(ids))

    def selected_mask(self) -> int:
        return bits.from_iter(self.by_origin)

    # -- mutation

    def add_point(self, origin: int, clopen: int, kind: str, note: str) -> int:
        if origin in self.by_origin:
            raise InvariantViolation(f"world {origin} would be selected twice")
        i = len(self.points)
        self.points.append(SelectedPoint(i, origin, clopen, kind))
        self.by_origin[origin] = i
        self.rk.append(1 << i)
        self.cluster.append(max(self.cluster, default=-1) + 1)
        self.version += 1
        self.log.append(
            f"round {self.round}: point {i} <- world {origin} [{kind}] {_TAGS[kind]}{note}"
        )
        return i

    def add_edge(self, a: int, b: int, note: str = "") -> bool:
        if self.rk[a] >> b & 1:
            return False
        target_row = self.rk[b]
        for i, row in enumerate(self.rk):
            if row >> a & 1:
                self.rk[i] = row | target_row
        self.version += 1
        self.log.append(f"round {self.round}: edge {a} -> {b}{note}")
        return True

    def link(self, a: int, b: int) -> None:
        ca, cb = self.cluster[a], self.cluster[b]
        if ca == cb:
            return
        self.cluster = [ca if c == cb else c for c in self.cluster]
        self.version += 1

    def link_by_origin(self, i: int) -> None:
        """Join ``i`` with every selected point whose origin is E-related."""
        same = self.frame.E[self.points[i].origin]
        for j in range(len(self.points)):
            if j != i and same >> self.points[j].origin & 1:
                self.link(j, i)
                return

    def A_set(self, y: int, w: WitnessFormula) -> int:
        """``[[<>psi]]`` minus every ``[[<>alpha]]`` that fails at ``y``."""
        key = (y, w.formula)
        if key not in self._A_cache:
            A = self.ext[w.formula]
            for d in witness_formulas(self.S)[1]:
                if not self.ext[d.formula] >> y & 1:
                    A &= ~self.ext[d.formula]
            self._A_cache[key] = A & self.frame.full
        return self._A_cache[key]


# --------------------------------------------------------------------------
# invariants


def check_invariants(state: FiltrationState) -> None:
    F = state.frame
    m = len(state.points)
    origins = [p.origin for p in state.points]
    if len(set(origins)) != m:
        raise InvariantViolation("two selected points share an origin")
    for i, p in enumerate(state.points):
        if not smax_set(F, p.selection_clopen) >> p.origin & 1:
            raise InvariantViolation(f"point {i} is not strongly maximal in its selection set")
    rk = state.rk
    for i in range(m):
        if not rk[i] >> i & 1:
            raise InvariantViolation(f"Rk not reflexive at {i}")
        if bits.image(rk, rk[i]) & ~rk[i]:
            raise InvariantViolation(f"Rk not transitive at {i}")
        for j in range(m):
            oi, oj = origins[i], origins[j]
            e_orig = bool(F.E[oi] >> oj & 1)
            if (state.cluster[i] == state.cluster[j]) != e_orig:
                raise InvariantViolation(f"Ek and E disagree on points {i}, {j}")
            if i != j and rk[i] >> j & 1:
                if rk[j] >> i & 1:
                    raise InvariantViolation(f"Rk not antisymmetric on {i}, {j}")
                r = bool(F.R[oi] >> oj & 1)
                q = bool(F.Q[oi] >> oj & 1)
                if not ((r and e_orig) or (q and not e_orig)):
                    raise InvariantViolation(f"Rk edge {i} -> {j} has no origin counterpart")


def _commutativity_violation(state: FiltrationState) -> Optional[tuple[int, int, int]]:
    m = len(state.points)
    for t in range(m):
        for u in bits.bits(state.ek(t)):
            for w in bits.bits(state.rk[u]):
                if not state.rk[t] & state.ek(w):
                    return (t, u, w)
    return None


# --------------------------------------------------------------------------
# steps


def select_root(M: Model, phi: Formula) -> FiltrationState:
    """Start from a strongly maximal point of ``[[~phi]]`` Q-reachable from the
    first refuting world."""
    state = FiltrationState(M, phi)
    F = M.frame
    refuting = F.full & ~state.truth(phi)
    if not refuting:
        raise NotRefuted(f"{render_formula(phi)} holds at every world of the model")
    u = bits.lowest(refuting)
    cands = F.Q[u] & smax_set(F, refuting)
    if not cands:
        raise InvariantViolation("no strongly maximal refutation point above the refuting world")
    state.add_point(bits.lowest(cands), refuting, "root", "")
    return state


def exists_step(state: FiltrationState) -> FiltrationState:
    """Give every existing point a same-cluster witness for each exists-type
    formula it needs."""
    F = state.frame
    for t in range(len(state.points)):
        origin = state.points[t].origin
        for w in state.witnesses.ex[origin]:
            target = state.truth(w.target)
            if state.origins(state.ek(t)) & target:
                continue
            reuse = F.E[origin] & target & state.selected_mask()
            if reuse:
                state.link(t, state.by_origin[bits.lowest(reuse)])
                continue
            clopen = F.e_image(state.points[t].selection_clopen) & target
            cands = smax_set(F, clopen) & F.E[origin] & target
            if not cands:
                raise InvariantViolation(
                    f"no exists-witness for {render_formula(w.formula)} at point {t}"
                )
            i = state.add_point(bits.lowest(cands), clopen, "exists_witness",
                                f" for point {t}, {render_formula(w.formula)}")
            state.link(t, i)
    return state


def _witnessed(state: FiltrationState, y: int, target: int) -> bool:
    return bool(state.origins(state.rk[y]) & target)


def diamond_step(state: FiltrationState) -> FiltrationState:
    """Horizontal pass (witnesses inside the cluster of the origin), then a
    vertical pass (witnesses in other clusters), over the points present now."""
    F = state.frame
    present = len(state.points)
    for y in range(present):
        oy = state.points[y].origin
        for w in state.witnesses.dia[oy]:
            target = state.truth(w.target)
            if _witnessed(state, y, target):
                continue
            A = state.A_set(oy, w)
            sm = smax_set(F, A)
            inside = F.R[oy] & F.E[oy] & sm & target
            reuse = inside & state.selected_mask()
            if reuse:
                u = state.by_origin[bits.lowest(reuse)]
                state.add_edge(y, u, f" horizontal reuse for {render_formula(w.formula)}")
                state.link(y, u)
                continue
            zs = F.Q[oy] & sm & target
            if not zs:
                raise InvariantViolation(f"no diamond witness candidate at point {y}")
            if not F.E[oy] >> bits.lowest(zs) & 1:
                continue  # handled by the vertical pass
            us = sm & max_set(F, target) & F.E[oy] & F.R[oy]
            if not us:
                raise InvariantViolation(f"no horizontal witness at point {y}")
            u = state.add_point(bits.lowest(us), A, "dia_horizontal",
                                f" for point {y}, {render_formula(w.formula)}")
            state.add_edge(y, u)
            state.link(y, u)
    for y in range(present):
        oy = state.points[y].origin
        for w in state.witnesses.dia[oy]:
            target = state.truth(w.target)
            if _witnessed(state, y, target):
                continue
            A = state.A_set(oy, w)
            sm = smax_set(F, A)
            outside = F.Q[oy] & ~F.E[oy] & sm & target
            reuse = outside & state.selected_mask()
            if reuse:
                z = state.by_origin[bits.lowest(reuse)]
                state.add_edge(y, z, f" vertical reuse for {render_formula(w.formula)}")
            else:
                if not outside or F.Q[oy] & F.E[oy] & sm & target:
                    raise InvariantViolation(f"no vertical witness at point {y}")
                z = state.add_point(bits.lowest(outside), A, "dia_vertical",
                                    f" for point {y}, {render_formula(w.formula)}")
                state.add_edge(y, z)
                state.link_by_origin(z)
            state.cross_edges.append(CrossEdge(y, z, w.formula, A, "vertical"))
    return state


def commutativity_step(state: FiltrationState) -> FiltrationState:
    """For ``t Ek y`` with a vertical edge ``y -> z``, make sure ``t`` sees the
    cluster of ``z``; repeat until nothing changes.  Composite violations are
    repaired through their vertical links, anything left is a bug."""
    F = state.frame
    changed = True
    while changed:
        changed = False
        for ce in list(state.cross_edges):
            if ce.kind != "vertical":
                continue
            EA = F.e_image(ce.A)
            oz = state.points[ce.target].origin
            for t in bits.bits(state.ek(ce.source)):
                if state.rk[t] & state.ek(ce.target):
                    continue
                ot = state.points[t].origin
                cands = smax_set(F, EA) & F.R[ot] & F.E[oz]
                if not cands:
                    raise InvariantViolation(f"no commutativity witness for point {t}")
                b = bits.lowest(cands)
                if b in state.by_origin:
                    bi = state.by_origin[b]
                else:
                    bi = state.add_point(b, EA, "commutativity",
                                         f" for point {t} along {ce.source} -> {ce.target}")
                state.add_edge(t, bi)
                state.link(bi, ce.target)
                state.cross_edges.append(CrossEdge(t, bi, ce.formula, EA, "commutativity"))
                changed = True
    bad = _commutativity_violation(state)
    if bad is not None:
        raise InvariantViolation(f"commutativity fails at {bad} with no vertical provenance")
    return state


# --------------------------------------------------------------------------
# bounds


def geometric_bound(s: int) -> int:
    """``1 + s + ... + s^(2^s - 1)``, saturating at ``SATURATION``."""
    terms = 1 << s if s < 64 else SATURATION
    total, power = 0, 1
    for _ in range(terms):
        total += power
        if total >= SATURATION:
            return SATURATION
        power *= s
    return total


def root_cluster_bound(s: int) -> int:
    return min(SATURATION, (s + 1) * geometric_bound(s))


def cluster_bound(s: int, preds: int, largest_pred: int) -> int:
    """Size cap for a non-root cluster with ``preds`` immediate predecessor
    clusters, the largest of which has ``largest_pred`` points."""
    return min(SATURATION, (s + s * largest_pred**2 * preds) * geometric_bound(s))


def chain_bound(s: int) -> int:
    return 1 << s


def skeleton_bound(s: int) -> int:
    return 2 << s


# --------------------------------------------------------------------------
# driver and result


@dataclass
class FiltrationResult:
    frame: MKFrame
    valuation: dict[str, int]
    origins: tuple[int, ...]
    kinds: tuple[str, ...]
    root: int
    stats: dict
    log: list[str]
    cross_edges: list[CrossEdge] = field(default_factory=list)

    @property
    def model(self) -> Model:
        return Model(self.frame, self.valuation)


def _skeleton_depth(F: MKFrame) -> int:
    sk = e_skeleton(F)
    return bits.longest_chain(sk.R, bits.full(sk.n))


def _cluster_chain(F: MKFrame) -> int:
    return max(bits.longest_chain(F.R, block) for block in F.block_masks)


def _enforce_caps(state: FiltrationState) -> None:
    s = len(state.S)
    cap = root_cluster_bound(s)
    sizes: dict[int, int] = {}
    for c in state.cluster:
        sizes[c] = sizes.get(c, 0) + 1
    if max(sizes.values()) > cap:
        raise BoundViolation(f"a cluster exceeds the safety cap of {cap} points")
    F = _state_frame(state)
    if _skeleton_depth(F) > skeleton_bound(s):
        raise BoundViolation(f"skeleton depth exceeds {skeleton_bound(s)}")


def _state_frame(state: FiltrationState) -> MKFrame:
    return MKFrame(len(state.points), tuple(state.rk), tuple(state.cluster))


def selective_filtration(M: Model, phi: Formula, check: bool = True) -> FiltrationResult:
    """Run rounds until a full round adds no points and no edges."""
    if not in_class(M.frame, "MGrz"):
        raise FrameClassError("selective filtration needs an MGrz model")
    state = select_root(M, phi)
    if check:
        check_invariants(state)
    while True:
        state.round += 1
        before = state.version
        for step in (exists_step, diamond_step, commutativity_step):
            step(state)
            if check:
                check_invariants(state)
        _enforce_caps(state)
        if state.version == before:
            break
    return _result(state)


def _result(state: FiltrationState) -> FiltrationResult:
    F = _state_frame(state)
    S_letters = sorted({p for g in state.S for p in letters(g)})
    origins = tuple(p.origin for p in state.points)
    valuation = {
        p: bits.from_iter(i for i, o in enumerate(origins) if state.model.value(p) >> o & 1)
        for p in S_letters
    }
    kinds = tuple(p.kind for p in state.points)
    stats = {
        "rounds": state.round,
        "points": len(origins),
        "source_worlds": state.frame.n,
        "points_per_kind": {k: kinds.count(k) for k in KINDS},
        "clusters": len(F.block_masks),
        "max_in_cluster_chain": _cluster_chain(F),
        "skeleton_depth": _skeleton_depth(F),
        "subformulas": len(state.S),
    }
    return FiltrationResult(F, valuation, origins, kinds, 0, stats, list(state.log),
                            list(state.cross_edges))


# --------------------------------------------------------------------------
# verification


def verify_truth_lemma(M: Model, result: FiltrationResult, S: tuple[Formula, ...]) -> list[dict]:
    """Disagreements between each selected point and its origin on ``S``."""
    out = []
    hat = result.model
    for g in S:
        orig = extensions(M, g)[g]
        sel = extensions(hat, g)[g]
        for i, o in enumerate(result.origins):
            if bool(sel >> i & 1) != bool(orig >> o & 1):
                out.append({"point": i, "origin": o, "formula": render_formula(g)})
    return out


@dataclass
class BoundsReport:
    passed: bool
    metrics: dict
    failures: list[str]

    def to_json(self) -> dict:
        return {"passed": self.passed, "metrics": self.metrics, "failures": self.failures}


def verify_bounds(result: FiltrationResult, S: tuple[Formula, ...]) -> BoundsReport:
    """Compare chain lengths and cluster sizes with their bounds in ``|S|``."""
    s = len(S)
    F = result.frame
    sk = e_skeleton(F)
    failures = []
    chain = _cluster_chain(F)
    depth = bits.longest_chain(sk.R, bits.full(sk.n))
    if chain > chain_bound(s):
        failures.append(f"in-cluster chain {chain} > {chain_bound(s)}")
    if depth > skeleton_bound(s):
        failures.append(f"skeleton chain {depth} > {skeleton_bound(s)}")
    sizes = [m.bit_count() for m in F.block_masks]
    root_block = F.blocks[result.root]
    clusters = []
    # immediate predecessors in the skeleton order
    strict = [row & ~(1 << i) for i, row in enumerate(sk.R)]
    for c in range(sk.n):
        if c == root_block:
            bound = root_cluster_bound(s)
        else:
            preds = [d for d in range(sk.n) if strict[d] >> c & 1]
            immediate = [d for d in preds if not any(strict[d] >> e & 1 for e in preds)]
            bound = cluster_bound(s, len(immediate), max((sizes[d] for d in immediate), default=0))
        clusters.append({"cluster": c, "size": sizes[c], "bound": bound,
                         "saturated": bound >= SATURATION})
        if sizes[c] > bound:
            failures.append(f"cluster {c} has {sizes[c]} points > {bound}")
    metrics = {
        "subformulas": s,
        "max_in_cluster_chain": chain,
        "in_cluster_chain_bound": chain_bound(s),
        "skeleton_depth": depth,
        "skeleton_depth_bound": skeleton_bound(s),
        "clusters": clusters,
    }
    return BoundsReport(not failures, metrics, failures)
