"""Directed graphs with omega-edge-bundles and the decidable graph conditions.

Two graph flavours are supported.  A ``Graph`` is an ordinary finite directed
graph whose parallel-edge bundles may be infinite (``omega`` families).  A
``LeveledGraph`` has a finite base segment followed by a block of levels that
repeats forever; it models graphs coming from level structures (one vertex
set per level, edges within a level or to the next one) and is the only kind
of infinite graph in scope.

Edges are grouped into *families*: a family is either a single edge or an
omega-bundle of countably many parallel edges sharing one source and one
range.  An individual edge is addressed by an ``EdgeRef`` pair
``(family_id, index)`` with ``index == 1`` for single families.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property

from .errors import GraphError, UnsupportedConditionError

OMEGA = float("inf")

EdgeRef = tuple  # (family_id: str, index: int)

SINGLE = "single"
OMEGA_MULT = "omega"


@dataclass(frozen=True)
class EdgeFamily:
    id: str
    source: str
    range: str
    multiplicity: str = SINGLE

    @property
    def is_omega(self) -> bool:
        return self.multiplicity == OMEGA_MULT


@dataclass(frozen=True)
class Verdict:
    """Checker outcome; ``witness`` is set exactly when ``holds`` is False."""

    holds: bool
    witness: object = None

    def __bool__(self) -> bool:
        return self.holds


class Graph:
    """A finite directed graph with ordered edge families.

    The declaration order of vertices and families is the labeling order used
    everywhere else in the toolkit; per vertex, single families are listed
    before the omega family (construction normalizes this).
    """

    is_finite = True

    def __init__(self, vertices, families):
        self.vertices = tuple(vertices)
        singles = [f for f in families if not f.is_omega]
        omegas = [f for f in families if f.is_omega]
        self.families = tuple(singles + omegas)
        self._validate()

    def _validate(self) -> None:
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex names")
        seen = set()
        omega_owner = set()
        for f in self.families:
            if f.id in seen:
                raise GraphError(f"duplicate family id {f.id!r}")
            seen.add(f.id)
            if f.source not in self._vertex_set or f.range not in self._vertex_set:
                raise GraphError(f"family {f.id!r} references an undeclared vertex")
            if f.is_omega:
                if f.source in omega_owner:
                    raise GraphError(f"two omega-families at vertex {f.source!r}")
                omega_owner.add(f.source)

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.vertices == other.vertices
            and self.families == other.families
        )

    def __hash__(self):
        return hash((self.vertices, self.families))

    def __repr__(self):
        return f"Graph(vertices={list(self.vertices)}, families={len(self.families)})"

    @cached_property
    def _vertex_set(self):
        return frozenset(self.vertices)

    @cached_property
    def _family_by_id(self):
        return {f.id: f for f in self.families}

    @cached_property
    def _out(self):
        out = {v: [] for v in self.vertices}
        for f in self.families:
            out[f.source].append(f)
        return out

    @cached_property
    def _in(self):
        inn = {v: [] for v in self.vertices}
        for f in self.families:
            inn[f.range].append(f)
        return inn

    def has_vertex(self, name: str) -> bool:
        return name in self._vertex_set

    def vertex_index(self, name: str) -> int:
        return self.vertices.index(name) + 1

    def vertex_by_index(self, i: int) -> str:
        return self.vertices[i - 1]

    def vertex_count(self):
        return len(self.vertices)

    def out_families(self, name: str):
        return tuple(self._out[name])

    def in_families(self, name: str):
        return tuple(self._in[name])

    def out_singles(self, name: str):
        return tuple(f for f in self._out[name] if not f.is_omega)

    def omega_family(self, name: str):
        for f in self._out[name]:
            if f.is_omega:
                return f
        return None

    def out_degree(self, name: str):
        if self.omega_family(name) is not None:
            return OMEGA
        return len(self._out[name])

    def is_sink(self, name: str) -> bool:
        return not self._out[name]

    def is_singular(self, name: str) -> bool:
        return self.is_sink(name) or self.omega_family(name) is not None

    def is_regular(self, name: str) -> bool:
        return not self.is_singular(name)

    def family(self, fid: str) -> EdgeFamily:
        try:
            return self._family_by_id[fid]
        except KeyError:
            raise GraphError(f"unknown family id {fid!r}") from None

    def check_ref(self, ref: EdgeRef) -> EdgeFamily:
        fid, idx = ref
        fam = self.family(fid)
        if not isinstance(idx, int) or idx < 1:
            raise GraphError(f"bad edge index in {ref!r}")
        if not fam.is_omega and idx != 1:
            raise GraphError(f"single family {fid!r} has no edge #{idx}")
        return fam

    def ref_source(self, ref: EdgeRef) -> str:
        return self.family(ref[0]).source

    def ref_range(self, ref: EdgeRef) -> str:
        return self.family(ref[0]).range

    def ref_sort_key(self, ref: EdgeRef):
        fid, idx = ref
        fam = self.family(fid)
        pos = self._out[fam.source].index(fam)
        return (self.vertices.index(fam.source), pos, idx)


# ---------------------------------------------------------------------------
# Leveled-infinite graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TemplateFamily:
    """Edge family template of a leveled graph.

    ``where`` is ``"same"`` (range on the source's level) or ``"next"``
    (range on the following level; from the last block level this wraps to
    level 0 of the next block repetition).  ``src_level`` pins the source's
    level (base index, or block-relative index for block families); it may
    be omitted when the source name appears on only one level.
    """

    id: str
    source: str
    range: str
    where: str = "next"
    src_level: int | None = None


class LeveledGraph:
    """Infinite graph given by base levels plus a forever-repeating block.

    Block vertex names containing ``{}`` are instantiated with the 1-based
    global level number (requires a singleton level); other block names get
    an ``@k`` repetition suffix.  Vertices enumerate the naturals level by
    level, which fixes the labeling used for embedding.
    """

    is_finite = False

    def __init__(self, base_levels, block_levels, base_families, block_families):
        self.base_levels = tuple(tuple(l) for l in base_levels)
        self.block_levels = tuple(tuple(l) for l in block_levels)
        self.base_families = tuple(base_families)
        self.block_families = tuple(block_families)
        self._validate()

    # -- template layout ----------------------------------------------------

    @property
    def _nbase(self) -> int:
        return len(self.base_levels)

    @property
    def _period(self) -> int:
        return len(self.block_levels)

    def _level_vertices(self, level: int):
        if level < self._nbase:
            return self.base_levels[level]
        return self.block_levels[(level - self._nbase) % self._period]

    def _level_size(self, level: int) -> int:
        return len(self._level_vertices(level))

    def _validate(self) -> None:
        if not self.block_levels or any(not l for l in self.block_levels):
            raise GraphError("leveled graph needs a nonempty repeating block")
        if any(not l for l in self.base_levels):
            raise GraphError("empty base level")
        names = [n for l in self.base_levels for n in l]
        if len(set(names)) != len(names):
            raise GraphError("duplicate base vertex names")
        for l in self.base_levels:
            for n in l:
                if "{}" in n or "@" in n:
                    raise GraphError(f"reserved characters in base vertex {n!r}")
        for li, l in enumerate(self.block_levels):
            for n in l:
                if "@" in n:
                    raise GraphError(f"reserved character in block vertex {n!r}")
                if "{}" in n and len(l) != 1:
                    raise GraphError("'{}' vertex template requires a singleton level")
        self._base_src = []
        for f in self.base_families:
            levs = [i for i, l in enumerate(self.base_levels) if f.source in l]
            if f.src_level is not None:
                levs = [l for l in levs if l == f.src_level]
            if len(levs) != 1:
                raise GraphError(f"family {f.id!r}: cannot resolve its source level")
            lev = levs[0]
            self._base_src.append(lev)
            if "{}" in f.id:
                raise GraphError(f"base family id {f.id!r} may not contain '{{}}'")
            tgt = lev if f.where == "same" else lev + 1
            if not self._template_at(tgt, f.range):
                raise GraphError(f"family {f.id!r} range not on level {tgt}")
        self._block_src = []
        for f in self.block_families:
            levs = [i for i, l in enumerate(self.block_levels) if f.source in l]
            if f.src_level is not None:
                levs = [l for l in levs if l == f.src_level]
            if len(levs) != 1:
                raise GraphError(f"family {f.id!r}: cannot resolve its source level")
            lev = levs[0]
            self._block_src.append(lev)
            if f.where == "same":
                ok = f.range in self.block_levels[lev]
            else:
                ok = f.range in self.block_levels[(lev + 1) % self._period]
            if not ok:
                raise GraphError(f"family {f.id!r} range not on the target level")
        # instantiating a few repetitions must give distinct names and ids
        probe_levels = self._nbase + 3 * self._period
        seen_v, seen_f = set(), set()
        for lev in range(probe_levels):
            for name in self.level_vertex_names(lev):
                if name in seen_v:
                    raise GraphError(f"vertex name collision at {name!r}")
                seen_v.add(name)
                for fam in self.out_families(name):
                    if fam.id in seen_f:
                        raise GraphError(f"family id collision at {fam.id!r}")
                    seen_f.add(fam.id)

    def _base_level_of(self, name: str):
        for i, l in enumerate(self.base_levels):
            if name in l:
                return i
        return None

    def _block_level_of(self, name: str):
        for i, l in enumerate(self.block_levels):
            if name in l:
                return i
        return None

    def _template_at(self, level: int, name: str) -> bool:
        if level < self._nbase:
            return name in self.base_levels[level]
        return name in self.block_levels[(level - self._nbase) % self._period]

    # -- instantiation ------------------------------------------------------

    def _vertex_name(self, level: int, template: str) -> str:
        if level < self._nbase:
            return template
        if "{}" in template:
            return template.format(level + 1)
        rep = (level - self._nbase) // self._period
        return f"{template}@{rep}"

    def _family_id(self, src_level: int, template_id: str) -> str:
        if src_level < self._nbase:
            return template_id
        if "{}" in template_id:
            return template_id.format(src_level + 1)
        rep = (src_level - self._nbase) // self._period
        return f"{template_id}@{rep}"

    def level_vertex_names(self, level: int):
        return tuple(self._vertex_name(level, t) for t in self._level_vertices(level))

    def resolve_vertex(self, name: str):
        """Return ``(level, position)`` for an instantiated vertex name."""
        lev = self._base_level_of(name)
        if lev is not None:
            return lev, self.base_levels[lev].index(name)
        if "@" in name:
            stem, _, rep_s = name.rpartition("@")
            if rep_s.isdigit():
                bl = self._block_level_of(stem)
                if bl is not None and "{}" not in stem:
                    return self._nbase + int(rep_s) * self._period + bl, self.block_levels[bl].index(stem)
            return None
        for bl, l in enumerate(self.block_levels):
            t = l[0]
            if "{}" not in t:
                continue
            pre, suf = t.split("{}", 1)
            m = re.fullmatch(re.escape(pre) + r"(\d+)" + re.escape(suf), name)
            if m:
                level = int(m.group(1)) - 1
                if level >= self._nbase and (level - self._nbase) % self._period == bl:
                    return level, 0
        return None

    def has_vertex(self, name: str) -> bool:
        return self.resolve_vertex(name) is not None

    def vertex_index(self, name: str) -> int:
        loc = self.resolve_vertex(name)
        if loc is None:
            raise GraphError(f"unknown vertex {name!r}")
        level, pos = loc
        return sum(self._level_size(l) for l in range(level)) + pos + 1

    def vertex_by_index(self, i: int) -> str:
        if i < 1:
            raise GraphError("vertex indices are 1-based")
        level, left = 0, i - 1
        while left >= self._level_size(level):
            left -= self._level_size(level)
            level += 1
        return self._vertex_name(level, self._level_vertices(level)[left])

    def vertex_count(self):
        return OMEGA

    def _templates_from(self, level: int):
        if level < self._nbase:
            return [f for f, sl in zip(self.base_families, self._base_src) if sl == level]
        bl = (level - self._nbase) % self._period
        return [f for f, sl in zip(self.block_families, self._block_src) if sl == bl]

    def out_families(self, name: str):
        loc = self.resolve_vertex(name)
        if loc is None:
            raise GraphError(f"unknown vertex {name!r}")
        level, pos = loc
        template = self._level_vertices(level)[pos]
        fams = []
        for t in self._templates_from(level):
            if t.source != template:
                continue
            tgt_level = level if t.where == "same" else level + 1
            fams.append(
                EdgeFamily(
                    id=self._family_id(level, t.id),
                    source=name,
                    range=self._vertex_name(tgt_level, t.range),
                    multiplicity=SINGLE,
                )
            )
        return tuple(fams)

    def out_singles(self, name: str):
        return self.out_families(name)

    def omega_family(self, name: str):
        return None

    def out_degree(self, name: str):
        return len(self.out_families(name))

    def is_sink(self, name: str) -> bool:
        return not self.out_families(name)

    def is_singular(self, name: str) -> bool:
        return self.is_sink(name)

    def is_regular(self, name: str) -> bool:
        return not self.is_sink(name)

    def resolve_family(self, fid: str):
        """Return ``(source_level, template)`` for an instantiated family id."""
        for f, sl in zip(self.base_families, self._base_src):
            if f.id == fid:
                return sl, f
        if "@" in fid:
            stem, _, rep_s = fid.rpartition("@")
            if rep_s.isdigit():
                for f, sl in zip(self.block_families, self._block_src):
                    if f.id == stem and "{}" not in stem:
                        return self._nbase + int(rep_s) * self._period + sl, f
            return None
        for f, sl in zip(self.block_families, self._block_src):
            if "{}" not in f.id:
                continue
            pre, suf = f.id.split("{}", 1)
            m = re.fullmatch(re.escape(pre) + r"(\d+)" + re.escape(suf), fid)
            if m:
                level = int(m.group(1)) - 1
                if level >= self._nbase and (level - self._nbase) % self._period == sl:
                    return level, f
        return None

    def family(self, fid: str) -> EdgeFamily:
        loc = self.resolve_family(fid)
        if loc is None:
            raise GraphError(f"unknown family id {fid!r}")
        level, t = loc
        tgt_level = level if t.where == "same" else level + 1
        return EdgeFamily(
            id=fid,
            source=self._vertex_name(level, t.source),
            range=self._vertex_name(tgt_level, t.range),
            multiplicity=SINGLE,
        )

    def check_ref(self, ref: EdgeRef) -> EdgeFamily:
        fid, idx = ref
        fam = self.family(fid)
        if idx != 1:
            raise GraphError(f"single family {fid!r} has no edge #{idx}")
        return fam

    def ref_source(self, ref: EdgeRef) -> str:
        return self.family(ref[0]).source

    def ref_range(self, ref: EdgeRef) -> str:
        return self.family(ref[0]).range

    def ref_sort_key(self, ref: EdgeRef):
        fid, idx = ref
        level, t = self.resolve_family(fid)
        order = [f.id for f in self._templates_from(level) if f.source == t.source]
        return (level, order.index(t.id), idx)

    def __eq__(self, other):
        return isinstance(other, LeveledGraph) and (
            self.base_levels,
            self.block_levels,
            self.base_families,
            self.block_families,
        ) == (
            other.base_levels,
            other.block_levels,
            other.base_families,
            other.block_families,
        )

    def __hash__(self):
        return hash(
            (self.base_levels, self.block_levels, self.base_families, self.block_families)
        )

    def __repr__(self):
        return f"LeveledGraph(base={len(self.base_levels)}, block={len(self.block_levels)})"


# ---------------------------------------------------------------------------
# Validation entry point
# ---------------------------------------------------------------------------


def validate_graph(g) -> None:
    """Re-check all structural invariants (also run at construction time)."""
    if isinstance(g, Graph):
        g._validate()
    elif isinstance(g, LeveledGraph):
        g._validate()
    else:
        raise GraphError(f"not a graph: {g!r}")


# ---------------------------------------------------------------------------
# Reachability and path counting (finite graphs)
# ---------------------------------------------------------------------------


def _require_finite(g, what: str):
    if not g.is_finite:
        raise UnsupportedConditionError(f"{what} is only decided for finite graphs")


def reaches(g, v: str, w: str) -> bool:
    """True iff some finite path (possibly trivial) runs from v to w."""
    _require_finite(g, "reachability")
    for name in (v, w):
        if not g.has_vertex(name):
            raise GraphError(f"unknown vertex {name!r}")
    if v == w:
        return True
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for f in g.out_families(u):
            if f.range == w:
                return True
            if f.range not in seen:
                seen.add(f.range)
                stack.append(f.range)
    return False


def _cycle_vertices(g) -> frozenset:
    """Vertices lying on some cycle (an omega loop family counts)."""
    index = {}
    low = {}
    onstack = {}
    result = set()
    counter = itertools.count()
    for root in g.vertices:
        if root in index:
            continue
        work = [(root, iter(g.out_families(root)))]
        index[root] = low[root] = next(counter)
        onstack[root] = True
        stack = [root]
        while work:
            u, it = work[-1]
            advanced = False
            for fam in it:
                x = fam.range
                if x == u:
                    result.add(u)  # self-loop
                if x not in index:
                    index[x] = low[x] = next(counter)
                    onstack[x] = True
                    stack.append(x)
                    work.append((x, iter(g.out_families(x))))
                    advanced = True
                    break
                elif onstack.get(x):
                    low[u] = min(low[u], index[x])
            if advanced:
                continue
            work.pop()
            if work:
                p = work[-1][0]
                low[p] = min(low[p], low[u])
            if low[u] == index[u]:
                comp = []
                while True:
                    x = stack.pop()
                    onstack[x] = False
                    comp.append(x)
                    if x == u:
                        break
                if len(comp) > 1:
                    result.update(comp)
    return frozenset(result)


def count_paths_capped(g, v: str, w: str, cap: int):
    """Exact number of v->w paths if below ``cap``, else the string ">=cap".

    Any route through a cycle or an omega-bundle saturates the count.
    """
    _require_finite(g, "path counting")
    if cap < 1:
        raise GraphError("cap must be positive")
    relevant = {u for u in g.vertices if reaches(g, v, u) and reaches(g, u, w)}
    if not relevant:
        return 0
    saturated = f">={cap}"
    cyc = _cycle_vertices(g)
    if relevant & cyc:
        return saturated
    for u in relevant:
        fam = g.omega_family(u)
        if fam is not None and fam.range in relevant:
            return saturated
    # relevant subgraph is a DAG of single edges
    memo = {}

    def count_from(u):
        if u in memo:
            return memo[u]
        total = 1 if u == w else 0
        for f in g.out_families(u):
            if f.range in relevant and u != w:
                total += count_from(f.range)
                if total >= cap:
                    total = cap
                    break
        memo[u] = total
        return total

    n = count_from(v)
    return saturated if n >= cap else n


# ---------------------------------------------------------------------------
# Graph conditions
# ---------------------------------------------------------------------------


def _functional_cycle(next_map: dict):
    """Find a cycle in a partial functional graph; returns vertex list or None."""
    color = {}
    for start in next_map:
        if start in color:
            continue
        path = []
        u = start
        while u in next_map and color.get(u) is None:
            color[u] = "active"
            path.append(u)
            u = next_map[u]
        if u in next_map and color.get(u) == "active":
            return path[path.index(u):]
        for x in path:
            color[x] = "done"
    return None


def _exitless_cycle_finite(g):
    next_map = {}
    via = {}
    for v in g.vertices:
        singles = g.out_singles(v)
        if g.omega_family(v) is None and len(singles) == 1:
            next_map[v] = singles[0].range
            via[v] = singles[0].id
    cyc = _functional_cycle(next_map)
    if cyc is None:
        return None
    return {"start": cyc[0], "cycle": [via[u] for u in cyc]}


def check_condition_L(g) -> Verdict:
    """Every cycle has an exit; witness is an exitless cycle."""
    if g.is_finite:
        w = _exitless_cycle_finite(g)
        return Verdict(w is None, w)
    # leveled: cycles live inside single levels; the template repeats, so the
    # base levels plus one block repetition cover all of them
    for level in range(g._nbase + g._period):
        names = g.level_vertex_names(level)
        next_map, via = {}, {}
        for n in names:
            fams = g.out_families(n)
            if len(fams) == 1 and g.resolve_vertex(fams[0].range)[0] == level:
                next_map[n] = fams[0].range
                via[n] = fams[0].id
        cyc = _functional_cycle(next_map)
        if cyc is not None:
            return Verdict(False, {"start": cyc[0], "cycle": [via[u] for u in cyc]})
    return Verdict(True)


def check_condition_K(g) -> Verdict:
    """Every vertex with a return path has at least two distinct ones."""
    _require_finite(g, "condition (K)")
    for v in g.vertices:
        n = _count_returns_capped(g, v, 2)
        if n == 1:
            return Verdict(False, v)
    return Verdict(True)


def _count_returns_capped(g, v: str, cap: int):
    """Number of first-return paths at v, capped; omega bundles saturate."""
    # split v into v_out / v_in and count v_out -> v_in paths
    out_node, in_node = ("__out__", v), ("__in__", v)

    def succ(u):
        name = v if u == out_node else u
        for f in g.out_families(name):
            tgt = in_node if f.range == v else f.range
            yield tgt, f.is_omega

    # reachability from v_out and to v_in in the split graph
    fwd = {out_node}
    stack = [out_node]
    while stack:
        u = stack.pop()
        for x, _ in succ(u):
            if x not in fwd and x != in_node:
                fwd.add(x)
                stack.append(x)
            elif x == in_node:
                fwd.add(in_node)
    if in_node not in fwd:
        return 0
    relevant = set()
    for u in fwd:
        if u == in_node:
            relevant.add(u)
            continue
        seen = {u}
        st = [u]
        hit = False
        while st and not hit:
            y = st.pop()
            for x, _ in succ(y):
                if x == in_node:
                    hit = True
                    break
                if x not in seen:
                    seen.add(x)
                    st.append(x)
        if hit:
            relevant.add(u)
    # a cycle among relevant interior vertices saturates the count
    interior = {u for u in relevant if u not in (out_node, in_node)}
    for u in interior:
        seen = set()
        st = [x for x, _ in succ(u) if x in interior]
        while st:
            y = st.pop()
            if y == u:
                return cap
            if y in seen:
                continue
            seen.add(y)
            st.extend(x for x, _ in succ(y) if x in interior)
    memo = {}

    def count_from(u):
        if u == in_node:
            return 1
        if u in memo:
            return memo[u]
        total = 0
        for x, is_omega in succ(u):
            if x not in relevant:
                continue
            mult = cap if is_omega else 1
            total += mult * count_from(x)
            if total >= cap:
                total = cap
                break
        memo[u] = total
        return total

    return min(count_from(out_node), cap)


def check_condition_T(g) -> Verdict:
    """Every vertex reaches a cycle or a doubly-reachable vertex."""
    _require_finite(g, "condition (T)")
    cyc = _cycle_vertices(g)
    for v in g.vertices:
        reach = {u for u in g.vertices if reaches(g, v, u)}
        if reach & cyc:
            continue
        # acyclic reachable part: count paths from v, saturating at 2
        order = _topo_order(g, reach)
        npaths = {u: 0 for u in reach}
        npaths[v] = 1
        ok = False
        for u in order:
            fam_mult = [(f.range, 2 if f.is_omega else 1) for f in g.out_families(u)]
            for tgt, mult in fam_mult:
                if tgt in reach:
                    npaths[tgt] = min(2, npaths[tgt] + mult * npaths[u])
                    if npaths[tgt] >= 2:
                        ok = True
        if not ok:
            return Verdict(False, v)
    return Verdict(True)


def _topo_order(g, subset):
    indeg = {u: 0 for u in subset}
    for u in subset:
        for f in g.out_families(u):
            if f.range in subset:
                indeg[f.range] += 1
    order = [u for u in subset if indeg[u] == 0]
    i = 0
    while i < len(order):
        u = order[i]
        i += 1
        for f in g.out_families(u):
            if f.range in subset:
                indeg[f.range] -= 1
                if indeg[f.range] == 0:
                    order.append(f.range)
    return order


def check_condition_W(g) -> Verdict:
    """Vacuously true for finite vertex sets; refused otherwise."""
    if g.is_finite:
        return Verdict(True)
    raise UnsupportedConditionError("condition W undecidable in this presentation")


def check_condition_infinity(g) -> Verdict:
    """Each infinite emitter returns to itself through its omega bundle."""
    _require_finite(g, "condition (infinity)")
    for v in g.vertices:
        fam = g.omega_family(v)
        if fam is not None and not reaches(g, fam.range, v):
            return Verdict(False, v)
    return Verdict(True)


def degenerate_vertices(g):
    """Classify vertices against the six short-orbit patterns."""
    _require_finite(g, "degenerate vertices")
    result = []
    for v in g.vertices:
        t = _degenerate_type(g, v)
        if t is not None:
            result.append((v, t))
    return result


def _degenerate_type(g, v: str):
    inf = g.in_families(v)
    in_omega = any(f.is_omega for f in inf)
    out_empty = not g.out_families(v)
    out_infinite = g.omega_family(v) is not None

    def is_source(u):
        return not g.in_families(u)

    if not in_omega and len(inf) == 1 and inf[0].source == v:
        return 1
    if not in_omega and len(inf) == 2:
        loops = [f for f in inf if f.source == v]
        others = [f for f in inf if f.source != v]
        if len(loops) == 1 and len(others) == 1 and is_source(others[0].source):
            return 2
    if not in_omega and len(inf) == 1 and inf[0].source != v:
        w = inf[0].source
        winf = g.in_families(w)
        if len(winf) == 1 and not winf[0].is_omega and winf[0].source == v:
            return 3
        if g.is_singular(v) and is_source(w):
            return 5
    if out_infinite and not inf:
        return 4
    if out_empty and not inf:
        return 6
    return None


def check_cofinal(g) -> Verdict:
    """Every vertex reaches every vertex lying on a cycle."""
    _require_finite(g, "cofinality")
    cyc = _cycle_vertices(g)
    for v in g.vertices:
        for c in cyc:
            if not reaches(g, v, c):
                return Verdict(False, (v, c))
    return Verdict(True)


def check_minimal(g) -> Verdict:
    """Cofinal and every vertex reaches every singular vertex."""
    _require_finite(g, "minimality")
    cof = check_cofinal(g)
    if not cof.holds:
        return cof
    for v in g.vertices:
        for s in g.vertices:
            if g.is_singular(s) and not reaches(g, v, s):
                return Verdict(False, (v, s))
    return Verdict(True)


def check_strongly_connected(g) -> Verdict:
    _require_finite(g, "strong connectedness")
    for v in g.vertices:
        for w in g.vertices:
            if not reaches(g, v, w):
                return Verdict(False, (v, w))
    return Verdict(True)


def has_sinks(g) -> bool:
    if g.is_finite:
        return any(g.is_sink(v) for v in g.vertices)
    for level in range(g._nbase + g._period):
        for n in g.level_vertex_names(level):
            if not g.out_families(n):
                return True
    return False


def _semi_tail_witness(g: LeveledGraph):
    """Cycle in the out-degree-1 level-quotient of the repeating block."""
    p = g._period
    next_map, via = {}, {}
    for r in range(p):
        level = g._nbase + r
        for n in g.level_vertex_names(level):
            fams = g.out_families(n)
            if len(fams) != 1:
                continue
            tgt = fams[0].range
            tgt_level, tgt_pos = g.resolve_vertex(tgt)
            key = (r, g.resolve_vertex(n)[1])
            tkey = ((tgt_level - g._nbase) % p, tgt_pos)
            next_map[key] = (tkey, tgt_level - level)
            via[key] = fams[0].id
    flat = {k: v[0] for k, v in next_map.items()}
    cyc = _functional_cycle(flat)
    if cyc is None:
        return None
    if all(next_map[k][1] == 0 for k in cyc):
        return None  # genuine cycle inside one level: exitless cycle, not a semi-tail
    start = g.level_vertex_names(g._nbase + cyc[0][0])[cyc[0][1]]
    return {"start": start, "cycle": [via[k] for k in cyc]}


def has_semi_tails(g) -> bool:
    if g.is_finite:
        return False
    return _semi_tail_witness(g) is not None


def isolated_point_witnesses(g):
    """Sinks, exitless cycles and (leveled graphs) semi-tails."""
    out = []
    if g.is_finite:
        for v in g.vertices:
            if g.is_sink(v):
                out.append({"kind": "sink", "vertex": v})
        w = _exitless_cycle_finite(g)
        if w is not None:
            out.append({"kind": "exitless-cycle", **w})
        return out
    for level in range(g._nbase + g._period):
        for n in g.level_vertex_names(level):
            if not g.out_families(n):
                out.append({"kind": "sink", "vertex": n})
    lw = check_condition_L(g)
    if not lw.holds:
        out.append({"kind": "exitless-cycle", **lw.witness})
    st = _semi_tail_witness(g)
    if st is not None:
        out.append({"kind": "semi-tail", **st})
    return out


def condition_report(g) -> dict:
    """All condition verdicts as one JSON-ready mapping."""

    def cell(verdict: Verdict):
        return {"holds": verdict.holds, "witness": _json_witness(verdict.witness)}

    report = {}
    if g.is_finite:
        report["L"] = cell(check_condition_L(g))
        report["K"] = cell(check_condition_K(g))
        report["T"] = cell(check_condition_T(g))
        report["W"] = cell(check_condition_W(g))
        report["infinity"] = cell(check_condition_infinity(g))
        report["cofinal"] = cell(check_cofinal(g))
        report["strongly_connected"] = cell(check_strongly_connected(g))
        report["minimal"] = cell(check_minimal(g))
    else:
        report["L"] = cell(check_condition_L(g))
        for name in ("K", "T", "infinity", "cofinal", "strongly_connected", "minimal"):
            report[name] = {"holds": None, "note": "not decided for leveled-infinite graphs"}
        report["W"] = {"holds": None, "note": "condition W undecidable in this presentation"}
    report["has_sinks"] = has_sinks(g)
    iso = isolated_point_witnesses(g)
    report["isolated_points"] = iso
    report["has_isolated_points"] = bool(iso)
    if g.is_finite:
        report["degenerate_vertices"] = [[v, t] for v, t in degenerate_vertices(g)]
    return report


def _json_witness(w):
    if w is None or isinstance(w, (str, dict)):
        return w
    if isinstance(w, tuple):
        return list(w)
    return w


# ---------------------------------------------------------------------------
# JSON format
# ---------------------------------------------------------------------------


def graph_to_json(g) -> dict:
    if isinstance(g, Graph):
        return {
            "vertices": list(g.vertices),
            "edges": [
                {
                    "id": f.id,
                    "src": f.source,
                    "rng": f.range,
                    "mult": "omega" if f.is_omega else "1",
                }
                for f in g.families
            ],
        }
    return {
        "kind": "leveled",
        "base_levels": [list(l) for l in g.base_levels],
        "block_levels": [list(l) for l in g.block_levels],
        "base_edges": [
            {"id": f.id, "src": f.source, "rng": f.range, "where": f.where,
             **({"src_level": f.src_level} if f.src_level is not None else {})}
            for f in g.base_families
        ],
        "block_edges": [
            {"id": f.id, "src": f.source, "rng": f.range, "where": f.where,
             **({"src_level": f.src_level} if f.src_level is not None else {})}
            for f in g.block_families
        ],
    }


def graph_from_json(data: dict):
    from .errors import ParseError

    if not isinstance(data, dict):
        raise ParseError("graph file must hold a JSON object")
    if data.get("kind") == "leveled":
        try:
            base = data.get("base_levels", [])
            block = data["block_levels"]
            bf = [
                TemplateFamily(e["id"], e["src"], e["rng"], e.get("where", "next"),
                               e.get("src_level"))
                for e in data.get("base_edges", [])
            ]
            kf = [
                TemplateFamily(e["id"], e["src"], e["rng"], e.get("where", "next"),
                               e.get("src_level"))
                for e in data.get("block_edges", [])
            ]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad leveled graph JSON: {exc}") from exc
        return LeveledGraph(base, block, bf, kf)
    try:
        vertices = data["vertices"]
        families = [
            EdgeFamily(
                e["id"],
                e["src"],
                e["rng"],
                OMEGA_MULT if e.get("mult", "1") == "omega" else SINGLE,
            )
            for e in data["edges"]
        ]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad graph JSON: {exc}") from exc
    return Graph(vertices, families)
