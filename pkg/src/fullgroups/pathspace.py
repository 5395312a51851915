"""Finite paths, boundary points, and exact algebra of compact open sets.

A compact open subset of the boundary path space is kept as a finite disjoint
union of cylinder atoms ``Z(mu \\ F)``: boundary paths extending ``mu`` whose
continuation edge avoids the finite edge set ``F``.  All set operations are
exact; equality is decided by mutual subtraction rather than a canonical
form.

Boundary points are restricted to the computable ones: finite paths ending
at a singular vertex, and eventually periodic infinite paths kept in minimal
form (shortest prefix, primitive cycle).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import AtomError, ParseError, PathError
from .graph import EdgeRef


@dataclass(frozen=True)
class FinitePath:
    start: str
    edges: tuple
    rng: str

    def __len__(self) -> int:
        return len(self.edges)


def make_path(g, start: str, edges=()) -> FinitePath:
    """Build a validated finite path; ``edges`` is a sequence of EdgeRefs."""
    if not g.has_vertex(start):
        raise PathError(f"unknown start vertex {start!r}")
    at = start
    edges = tuple(tuple(e) for e in edges)
    for ref in edges:
        fam = g.check_ref(ref)
        if fam.source != at:
            raise PathError(f"edge {ref!r} does not continue the path at {at!r}")
        at = fam.range
    return FinitePath(start, edges, at)


def trivial_path(g, vertex: str) -> FinitePath:
    return make_path(g, vertex, ())


def concat(g, p: FinitePath, q: FinitePath) -> FinitePath:
    if q.start != p.rng:
        raise PathError("paths do not compose")
    return FinitePath(p.start, p.edges + q.edges, q.rng)


def extend(g, p: FinitePath, ref: EdgeRef) -> FinitePath:
    fam = g.check_ref(ref)
    if fam.source != p.rng:
        raise PathError(f"edge {ref!r} does not start at {p.rng!r}")
    return FinitePath(p.start, p.edges + (tuple(ref),), fam.range)


def is_prefix(p: FinitePath, q: FinitePath) -> bool:
    """True iff p is an initial segment of q (paths share the start vertex)."""
    return p.start == q.start and q.edges[: len(p.edges)] == p.edges


def path_sort_key(g, p: FinitePath):
    vkey = g.vertex_index(p.start)
    return (vkey, tuple(g.ref_sort_key(e) for e in p.edges))


# ---------------------------------------------------------------------------
# Cylinder atoms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CylinderAtom:
    mu: FinitePath
    F: frozenset

    @property
    def depth(self) -> int:
        return len(self.mu.edges)


def _out_refs(g, vertex: str):
    """All out-edge refs at a regular vertex (finite by definition)."""
    return frozenset((f.id, 1) for f in g.out_singles(vertex))


def _atom_or_none(g, mu: FinitePath, F) -> CylinderAtom | None:
    """Atom constructor that returns None instead of an empty atom."""
    F = frozenset(tuple(e) for e in F)
    if g.is_regular(mu.rng) and F == _out_refs(g, mu.rng):
        return None
    return CylinderAtom(mu, F)


def atom(g, mu: FinitePath, F=frozenset()) -> CylinderAtom:
    """Validated nonempty atom Z(mu \\ F)."""
    F = frozenset(tuple(e) for e in F)
    for ref in F:
        fam = g.check_ref(ref)
        if fam.source != mu.rng:
            raise AtomError(f"excluded edge {ref!r} is not outgoing at {mu.rng!r}")
    if g.is_sink(mu.rng) and F:
        raise AtomError("F must be empty at a sink")
    a = _atom_or_none(g, mu, F)
    if a is None:
        raise AtomError("empty atom: every outgoing edge excluded at a regular vertex")
    return a


def atom_sort_key(g, a: CylinderAtom):
    return (path_sort_key(g, a.mu), tuple(sorted(g.ref_sort_key(e) for e in a.F)))


def atom_intersect(g, a: CylinderAtom, b: CylinderAtom):
    """Intersection of two atoms: None, one of them, or a merged-F atom."""
    if a.mu == b.mu:
        return _atom_or_none(g, a.mu, a.F | b.F)
    if is_prefix(a.mu, b.mu):
        e = b.mu.edges[len(a.mu.edges)]
        return b if e not in a.F else None
    if is_prefix(b.mu, a.mu):
        e = a.mu.edges[len(b.mu.edges)]
        return a if e not in b.F else None
    return None


def atom_subtract(g, a: CylinderAtom, b: CylinderAtom):
    """a minus b as a disjoint list of atoms."""
    inter = atom_intersect(g, a, b)
    if inter is None:
        return [a]
    if inter == a:
        return []
    out = []
    if a.mu == b.mu:
        for e in b.F - a.F:
            out.append(_atom_or_none(g, extend(g, a.mu, e), frozenset()))
        return [x for x in out if x is not None]
    # here a.mu < b.mu strictly and b's branch is allowed in a
    k = len(a.mu.edges)
    out.append(_atom_or_none(g, a.mu, a.F | {b.mu.edges[k]}))
    for d in range(k + 1, len(b.mu.edges)):
        stem = FinitePath(a.mu.start, b.mu.edges[:d], g.ref_source(b.mu.edges[d]))
        out.append(_atom_or_none(g, stem, frozenset({b.mu.edges[d]})))
    for e in b.F:
        out.append(_atom_or_none(g, extend(g, b.mu, e), frozenset()))
    return [x for x in out if x is not None]


def atom_split(g, a: CylinderAtom, e: EdgeRef):
    """Z(mu\\F) = Z(mu\\(F+{e})) + Z(mu e); empty residual is dropped."""
    e = tuple(e)
    fam = g.check_ref(e)
    if fam.source != a.mu.rng:
        raise AtomError(f"edge {e!r} is not outgoing at {a.mu.rng!r}")
    if e in a.F:
        raise AtomError(f"edge {e!r} already excluded")
    parts = [
        _atom_or_none(g, a.mu, a.F | {e}),
        _atom_or_none(g, extend(g, a.mu, e), frozenset()),
    ]
    kept = sorted((x for x in parts if x is not None), key=lambda x: atom_sort_key(g, x))
    return CompactOpen(tuple(kept))


# ---------------------------------------------------------------------------
# Compact opens
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompactOpen:
    atoms: tuple

    def is_empty(self) -> bool:
        return not self.atoms


def co_make(g, atoms) -> CompactOpen:
    """Normalize a list of atoms: disjointify, merge siblings, sort."""
    disjoint = []
    for a in atoms:
        parts = [a]
        for r in disjoint:
            parts = [x for p in parts for x in atom_subtract(g, p, r)]
        disjoint.extend(parts)
    merged = _merge_atoms(g, disjoint)
    return CompactOpen(tuple(sorted(merged, key=lambda a: atom_sort_key(g, a))))


def _merge_atoms(g, atoms):
    """Fixpoint of the sibling-merge rules on a disjoint atom list."""
    items = set(atoms)
    changed = True
    while changed:
        changed = False
        # same-stem pair: the union is the F-intersection atom
        by_stem = {}
        for a in items:
            by_stem.setdefault(a.mu, []).append(a)
        for stem, group in by_stem.items():
            if len(group) >= 2:
                a, b = group[0], group[1]
                items -= {a, b}
                items.add(CylinderAtom(stem, a.F & b.F))
                changed = True
                break
        if changed:
            continue
        plain = {(a.mu.start, a.mu.edges): a for a in items if not a.F}
        for a in list(items):
            if a.F:
                # child Z(mu e) absorbed into Z(mu \ F) when e is excluded
                hit = None
                for e in a.F:
                    child = plain.get((a.mu.start, a.mu.edges + (e,)))
                    if child is not None:
                        hit = (e, child)
                        break
                if hit is not None:
                    e, child = hit
                    items -= {a, child}
                    items.add(CylinderAtom(a.mu, a.F - {e}))
                    changed = True
                    break
            elif a.mu.edges:
                # complete sibling family at a regular vertex becomes the parent
                parent_edges = a.mu.edges[:-1]
                w = g.ref_source(a.mu.edges[-1])
                if not g.is_regular(w):
                    continue
                sibs = [plain.get((a.mu.start, parent_edges + (e,))) for e in _out_refs(g, w)]
                if sibs and all(s is not None for s in sibs):
                    parent = FinitePath(a.mu.start, parent_edges, w)
                    items -= set(sibs)
                    items.add(CylinderAtom(parent, frozenset()))
                    changed = True
                    break
    return items


def co_union(g, x: CompactOpen, y: CompactOpen) -> CompactOpen:
    return co_make(g, list(x.atoms) + list(y.atoms))


def co_intersect(g, x: CompactOpen, y: CompactOpen) -> CompactOpen:
    out = []
    for a in x.atoms:
        for b in y.atoms:
            i = atom_intersect(g, a, b)
            if i is not None:
                out.append(i)
    return co_make(g, out)


def co_subtract(g, x: CompactOpen, y: CompactOpen) -> CompactOpen:
    parts = list(x.atoms)
    for b in y.atoms:
        parts = [r for a in parts for r in atom_subtract(g, a, b)]
    return co_make(g, parts)


def co_is_empty(x: CompactOpen) -> bool:
    return x.is_empty()


def co_equals(g, x: CompactOpen, y: CompactOpen) -> bool:
    return co_subtract(g, x, y).is_empty() and co_subtract(g, y, x).is_empty()


def full_space(g) -> CompactOpen:
    if not g.is_finite:
        raise PathError("the boundary space of an infinite-vertex graph is not compact")
    return co_make(g, [atom(g, trivial_path(g, v)) for v in g.vertices])


# ---------------------------------------------------------------------------
# Boundary points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryPoint:
    """Finite (cycle is None) or eventually periodic boundary path."""

    prefix: FinitePath
    cycle: FinitePath | None

    @property
    def is_finite(self) -> bool:
        return self.cycle is None


def finite_point(g, mu: FinitePath) -> BoundaryPoint:
    if not g.is_singular(mu.rng):
        raise PathError(f"finite boundary paths must end at a singular vertex, not {mu.rng!r}")
    return BoundaryPoint(mu, None)


def _primitive(edges: tuple) -> tuple:
    n = len(edges)
    for d in range(1, n + 1):
        if n % d == 0 and edges == edges[:d] * (n // d):
            return edges[:d]
    return edges


def periodic_point(g, prefix: FinitePath, cycle: FinitePath) -> BoundaryPoint:
    """Eventually periodic point prefix . cycle^inf, stored in minimal form."""
    if not cycle.edges:
        raise PathError("cycle must be nonempty")
    if cycle.start != cycle.rng or cycle.start != prefix.rng:
        raise PathError("cycle must be based at the end of the prefix")
    cyc = _primitive(cycle.edges)
    pre = prefix.edges
    start = prefix.start
    # roll the prefix back while its last edge matches the cycle's last edge
    while pre and pre[-1] == cyc[-1]:
        pre = pre[:-1]
        cyc = (cyc[-1],) + cyc[:-1]
    p = make_path(g, start, pre)
    c = make_path(g, p.rng, cyc)
    return BoundaryPoint(p, c)


def point_edge(p: BoundaryPoint, i: int):
    """The i-th edge (0-based) of the unrolled point, or None past a finite end."""
    k = len(p.prefix.edges)
    if i < k:
        return p.prefix.edges[i]
    if p.cycle is None:
        return None
    c = p.cycle.edges
    return c[(i - k) % len(c)]


def point_starts_with(g, p: BoundaryPoint, stem: FinitePath) -> bool:
    if stem.start != p.prefix.start:
        return False
    for i, e in enumerate(stem.edges):
        if point_edge(p, i) != e:
            return False
    return True


def point_in_atom(g, p: BoundaryPoint, a: CylinderAtom) -> bool:
    if not point_starts_with(g, p, a.mu):
        return False
    nxt = point_edge(p, len(a.mu.edges))
    return nxt is None or nxt not in a.F


def co_contains_point(g, x: CompactOpen, p: BoundaryPoint) -> bool:
    return any(point_in_atom(g, p, a) for a in x.atoms)


def point_equal(p: BoundaryPoint, q: BoundaryPoint) -> bool:
    """Minimal forms are canonical, so equality is structural."""
    return p == q


def shift_point(g, p: BoundaryPoint) -> BoundaryPoint:
    if p.cycle is None:
        if not p.prefix.edges:
            raise PathError("cannot shift a boundary path of length zero")
        e = p.prefix.edges[0]
        return BoundaryPoint(make_path(g, g.ref_range(e), p.prefix.edges[1:]), None)
    if p.prefix.edges:
        e = p.prefix.edges[0]
        pre = make_path(g, g.ref_range(e), p.prefix.edges[1:])
        return periodic_point(g, pre, p.cycle)
    c = p.cycle.edges
    rotated = c[1:] + c[:1]
    start = g.ref_range(c[0])
    return periodic_point(g, trivial_path(g, start), make_path(g, start, rotated))


def replace_point_prefix(g, p: BoundaryPoint, old: FinitePath, new: FinitePath) -> BoundaryPoint:
    """Rewrite p = old.z into new.z; requires old to prefix p and r(old)=r(new)."""
    if not point_starts_with(g, p, old):
        raise PathError("point does not extend the prefix being replaced")
    if old.rng != new.rng:
        raise PathError("replacement prefix ends at a different vertex")
    k = len(old.edges)
    if p.cycle is None:
        rest = make_path(g, old.rng, p.prefix.edges[k:])
        return BoundaryPoint(concat(g, new, rest), None)
    npre = len(p.prefix.edges)
    if k <= npre:
        rest = make_path(g, old.rng, p.prefix.edges[k:])
        return periodic_point(g, concat(g, new, rest), p.cycle)
    d = (k - npre) % len(p.cycle.edges)
    c = p.cycle.edges
    rotated = c[d:] + c[:d]
    return periodic_point(g, new, make_path(g, new.rng, rotated))


def tail_equivalent(g, p: BoundaryPoint, q: BoundaryPoint) -> bool:
    """Same orbit: finite points need equal range; periodic ones conjugate cycles."""
    if p.is_finite != q.is_finite:
        return False
    if p.is_finite:
        return p.prefix.rng == q.prefix.rng
    c, d = p.cycle.edges, q.cycle.edges
    if len(c) != len(d):
        return False
    return any(d[i:] + d[:i] == c for i in range(len(d)))


def witness_point(g, a: CylinderAtom, max_steps: int = 10_000) -> BoundaryPoint:
    """A representable point inside the atom: extend greedily to a sink,
    an omega-vertex, or a cycle."""
    path = a.mu
    banned = set(a.F)
    seen = {}
    for _ in range(max_steps):
        v = path.rng
        if g.is_sink(v) or g.omega_family(v) is not None:
            return finite_point(g, path)
        if v in seen:
            k = seen[v]
            pre = make_path(g, path.start, path.edges[:k])
            cyc = make_path(g, v, path.edges[k:])
            return periodic_point(g, pre, cyc)
        seen[v] = len(path.edges)
        options = [(f.id, 1) for f in g.out_singles(v) if (f.id, 1) not in banned]
        if not options:
            raise AtomError("atom is empty")
        banned = set()
        path = extend(g, path, options[0])
    raise PathError("no representable witness found (wandering-only graph?)")


# ---------------------------------------------------------------------------
# Literals
# ---------------------------------------------------------------------------

_REF_RE = re.compile(r"^(?P<fam>[^\[\]]+?)(?:\[(?P<idx>\d+)\])?$")


def format_ref(g, ref: EdgeRef) -> str:
    fid, idx = ref
    fam = g.family(fid)
    return f"{fid}[{idx}]" if fam.is_omega else fid


def parse_ref(g, text: str) -> EdgeRef:
    m = _REF_RE.match(text.strip())
    if not m:
        raise ParseError(f"bad edge reference {text!r}")
    fid = m.group("fam")
    idx = int(m.group("idx")) if m.group("idx") else 1
    ref = (fid, idx)
    try:
        g.check_ref(ref)
    except Exception as exc:
        raise ParseError(f"bad edge reference {text!r}: {exc}") from exc
    return ref


def format_path(g, p: FinitePath) -> str:
    return f"{p.start}:" + ",".join(format_ref(g, e) for e in p.edges)


def parse_path(g, text: str) -> FinitePath:
    text = text.strip()
    if ":" not in text:
        raise ParseError(f"bad path literal {text!r} (missing ':')")
    start, _, rest = text.partition(":")
    start = start.strip()
    rest = rest.strip()
    refs = [parse_ref(g, tok) for tok in rest.split(",") if tok.strip()] if rest else []
    try:
        return make_path(g, start, refs)
    except PathError as exc:
        raise ParseError(str(exc)) from exc


def format_point(g, p: BoundaryPoint) -> str:
    if p.cycle is None:
        return format_path(g, p.prefix) + " !"
    cyc = ",".join(format_ref(g, e) for e in p.cycle.edges)
    return f"{format_path(g, p.prefix)} / ({cyc})"


def parse_point(g, text: str) -> BoundaryPoint:
    text = text.strip()
    if "/" in text:
        head, _, tail = text.partition("/")
        prefix = parse_path(g, head)
        tail = tail.strip()
        if not (tail.startswith("(") and tail.endswith(")")):
            raise ParseError(f"bad cycle part in point literal {text!r}")
        refs = [parse_ref(g, tok) for tok in tail[1:-1].split(",") if tok.strip()]
        if not refs:
            raise ParseError("empty cycle in point literal")
        try:
            cyc = make_path(g, prefix.rng, refs)
            return periodic_point(g, prefix, cyc)
        except PathError as exc:
            raise ParseError(str(exc)) from exc
    if text.endswith("!"):
        mu = parse_path(g, text[:-1])
        try:
            return finite_point(g, mu)
        except PathError as exc:
            raise ParseError(str(exc)) from exc
    raise ParseError(f"bad point literal {text!r} (expected '... !' or '... / (...)')")


def co_to_json(g, x: CompactOpen) -> list:
    return [
        {"mu": format_path(g, a.mu), "F": sorted(format_ref(g, e) for e in a.F)}
        for a in x.atoms
    ]


def co_from_json(g, data) -> CompactOpen:
    if not isinstance(data, list):
        raise ParseError("compact open JSON must be a list")
    atoms = []
    for rec in data:
        mu = parse_path(g, rec["mu"])
        F = [parse_ref(g, t) for t in rec.get("F", [])]
        try:
            atoms.append(atom(g, mu, F))
        except AtomError as exc:
            raise ParseError(str(exc)) from exc
    return co_make(g, atoms)
