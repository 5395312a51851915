"""Prefix-exchange tables: elements of the topological full group.

A table is a finite list of pieces ``(mu, F, lam)`` acting on the boundary
path space by ``lam.z -> mu.z`` on ``Z(lam \\ F)`` and as the identity
elsewhere.  Validation enforces the bisection invariants: the domain atoms
are pairwise disjoint, the codomain atoms are pairwise disjoint, and both
unions agree.

Germ-level operations (canonical form, equality, support) require the graph
to satisfy the exit condition on cycles; without it the table/homeomorphism
correspondence breaks down and those operations refuse to answer.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

from .errors import ArrowError, GermError, ParseError, TableError
from .graph import check_condition_L
from .pathspace import (
    BoundaryPoint,
    CompactOpen,
    CylinderAtom,
    FinitePath,
    atom,
    atom_intersect,
    atom_sort_key,
    atom_split,
    atom_subtract,
    co_contains_point,
    co_intersect,
    co_make,
    extend,
    format_path,
    format_point,
    make_path,
    parse_path,
    parse_point,
    point_equal,
    point_in_atom,
    replace_point_prefix,
    shift_point,
    trivial_path,
)


@dataclass(frozen=True)
class Piece:
    mu: FinitePath
    F: frozenset
    lam: FinitePath

    @property
    def lag(self) -> int:
        return len(self.mu.edges) - len(self.lam.edges)

    def inverse(self) -> "Piece":
        return Piece(self.lam, self.F, self.mu)


def make_piece(g, mu: FinitePath, F, lam: FinitePath) -> Piece:
    if mu.rng != lam.rng:
        raise TableError(f"piece stems end at different vertices: {mu.rng!r} vs {lam.rng!r}")
    F = frozenset(tuple(e) for e in F)
    atom(g, mu, F)
    atom(g, lam, F)
    return Piece(mu, F, lam)


def domain_atom(p: Piece) -> CylinderAtom:
    return CylinderAtom(p.lam, p.F)


def codomain_atom(p: Piece) -> CylinderAtom:
    return CylinderAtom(p.mu, p.F)


@dataclass(frozen=True)
class Table:
    graph: object
    pieces: tuple

    def __iter__(self):
        return iter(self.pieces)


def identity(g) -> Table:
    return Table(g, ())


def make_table(g, pieces, validate: bool = True) -> Table:
    norm = tuple(
        p if isinstance(p, Piece) else make_piece(g, *p) for p in pieces
    )
    norm = tuple(sorted(norm, key=lambda p: atom_sort_key(g, domain_atom(p))))
    t = Table(g, norm)
    if validate:
        validate_table(t)
    return t


def validate_table(t: Table) -> None:
    """Bisection invariants: disjoint domains, disjoint codomains, equal unions."""
    g = t.graph
    doms = []
    cods = []
    for p in t.pieces:
        if p.mu.rng != p.lam.rng:
            raise TableError("piece stems end at different vertices")
        atom(g, p.mu, p.F)
        atom(g, p.lam, p.F)
        doms.append(domain_atom(p))
        cods.append(codomain_atom(p))
    for i in range(len(doms)):
        for j in range(i + 1, len(doms)):
            if atom_intersect(g, doms[i], doms[j]) is not None:
                raise TableError("overlapping domain atoms")
            if atom_intersect(g, cods[i], cods[j]) is not None:
                raise TableError("overlapping codomain atoms")
    dom_u = co_make(g, doms)
    cod_u = co_make(g, cods)
    from .pathspace import co_equals

    if not co_equals(g, dom_u, cod_u):
        raise TableError("domain union differs from codomain union")


def apply(t: Table, p: BoundaryPoint) -> BoundaryPoint:
    """Evaluate the induced homeomorphism at a representable point."""
    g = t.graph
    for piece in t.pieces:
        if point_in_atom(g, p, domain_atom(piece)):
            return replace_point_prefix(g, p, piece.lam, piece.mu)
    return p


def inverse(t: Table) -> Table:
    return Table(t.graph, tuple(sorted((p.inverse() for p in t.pieces),
                                       key=lambda p: atom_sort_key(t.graph, domain_atom(p)))))


def compose(s: Table, t: Table) -> Table:
    """Table of ``s after t``; pieces are refined until they line up."""
    if s.graph != t.graph:
        raise TableError("tables live over different graphs")
    g = s.graph
    out = []
    s_doms = [(pj, domain_atom(pj)) for pj in s.pieces]
    for pi in t.pieces:
        cod = codomain_atom(pi)
        remaining = [cod]
        for pj, dj in s_doms:
            inter = atom_intersect(g, cod, dj)
            if inter is None:
                continue
            rel = inter.mu.edges[len(pi.mu.edges):]
            dom_stem = FinitePath(pi.lam.start, pi.lam.edges + rel, inter.mu.rng)
            rel2 = inter.mu.edges[len(pj.lam.edges):]
            cod_stem = FinitePath(pj.mu.start, pj.mu.edges + rel2, inter.mu.rng)
            out.append(Piece(cod_stem, inter.F, dom_stem))
            remaining = [r for a in remaining for r in atom_subtract(g, a, dj)]
        for left in remaining:
            rel = left.mu.edges[len(pi.mu.edges):]
            dom_stem = FinitePath(pi.lam.start, pi.lam.edges + rel, left.mu.rng)
            out.append(Piece(left.mu, left.F, dom_stem))
    t_doms = [domain_atom(pi) for pi in t.pieces]
    for pj in s.pieces:
        parts = [domain_atom(pj)]
        for da in t_doms:
            parts = [r for a in parts for r in atom_subtract(g, a, da)]
        for part in parts:
            rel = part.mu.edges[len(pj.lam.edges):]
            cod_stem = FinitePath(pj.mu.start, pj.mu.edges + rel, part.mu.rng)
            out.append(Piece(cod_stem, part.F, part.mu))
    out = [p for p in out if p.mu != p.lam]
    return make_table(g, out, validate=False)


def commutator(s: Table, t: Table) -> Table:
    return compose(compose(s, t), compose(inverse(s), inverse(t)))


@lru_cache(maxsize=None)
def _is_effective(g) -> bool:
    return check_condition_L(g).holds


def _require_effective(g) -> None:
    if not _is_effective(g):
        raise GermError("germ calculus requires effectiveness (condition L fails)")


def canonicalize(t: Table) -> Table:
    """Unique minimal table for the homeomorphism (graph must satisfy (L)).

    Identity pieces are dropped; aligned sibling pieces are merged upward:
    at a regular vertex the covered branch set is re-expressed as one piece
    (parent, child, or exclusion form), at an omega vertex excluded children
    are absorbed into the exclusion set.
    """
    g = t.graph
    _require_effective(g)
    pieces = set(p for p in t.pieces if p.mu != p.lam)
    changed = True
    while changed:
        changed = False
        parents = {}
        for p in pieces:
            parents.setdefault((p.mu, p.lam), {"direct": [], "children": {}})
            if p.mu.edges and p.lam.edges and not p.F:
                e_m, e_l = p.mu.edges[-1], p.lam.edges[-1]
                if e_m == e_l:
                    mu_p = FinitePath(p.mu.start, p.mu.edges[:-1], g.ref_source(e_m))
                    lam_p = FinitePath(p.lam.start, p.lam.edges[:-1], g.ref_source(e_m))
                    slot = parents.setdefault((mu_p, lam_p), {"direct": [], "children": {}})
                    slot["children"][e_m] = p
        for p in pieces:
            parents[(p.mu, p.lam)]["direct"].append(p)
        for (mu, lam), slot in sorted(parents.items(),
                                      key=lambda kv: -len(kv[0][0].edges)):
            directs, children = slot["direct"], slot["children"]
            if not directs and not children:
                continue
            w = mu.rng
            if g.is_regular(w):
                out_refs = frozenset((f.id, 1) for f in g.out_singles(w))
                covered = set(children)
                for d in directs:
                    covered |= out_refs - d.F
                if not covered:
                    continue
                if covered == out_refs:
                    canon = [Piece(mu, frozenset(), lam)]
                elif len(covered) == 1:
                    (e,) = covered
                    canon = [Piece(extend(g, mu, e), frozenset(), extend(g, lam, e))]
                else:
                    canon = [Piece(mu, out_refs - covered, lam)]
                current = directs + list(children.values())
                if set(canon) != set(current):
                    pieces -= set(current)
                    pieces |= set(canon)
                    changed = True
                    break
            else:
                if not directs:
                    continue
                d = directs[0]
                absorbed = [e for e in d.F if e in children]
                if absorbed:
                    pieces -= {d}
                    pieces -= {children[e] for e in absorbed}
                    pieces.add(Piece(mu, d.F - frozenset(absorbed), lam))
                    changed = True
                    break
    return make_table(g, pieces, validate=False)


def is_identity(t: Table) -> bool:
    return not canonicalize(t).pieces


def germ_equal(s: Table, t: Table) -> bool:
    if s.graph != t.graph:
        raise TableError("tables live over different graphs")
    return is_identity(compose(s, inverse(t)))


def support(t: Table) -> CompactOpen:
    """Union of the canonical domain atoms (the closed support)."""
    c = canonicalize(t)
    return co_make(t.graph, [domain_atom(p) for p in c.pieces])


def table_image(t: Table, x: CompactOpen) -> CompactOpen:
    """Forward image of a compact open under the table's homeomorphism."""
    g = t.graph
    doms = [domain_atom(p) for p in t.pieces]
    moved = []
    for p, d in zip(t.pieces, doms):
        for a in x.atoms:
            inter = atom_intersect(g, a, d)
            if inter is None:
                continue
            rel = inter.mu.edges[len(p.lam.edges):]
            moved.append(CylinderAtom(
                FinitePath(p.mu.start, p.mu.edges + rel, inter.mu.rng), inter.F))
    still = list(x.atoms)
    for d in doms:
        still = [r for a in still for r in atom_subtract(t.graph, a, d)]
    return co_make(g, moved + still)


# ---------------------------------------------------------------------------
# Constructors from partial data
# ---------------------------------------------------------------------------


def extend_by_identity(g, partial) -> Table:
    """Pieces whose domain and codomain unions agree, identity elsewhere."""
    return make_table(g, partial, validate=True)


def involution_hat(g, partial) -> Table:
    """partial + its inverse, identity elsewhere; an involution."""
    pieces = [p if isinstance(p, Piece) else make_piece(g, *p) for p in partial]
    doms = co_make(g, [domain_atom(p) for p in pieces])
    cods = co_make(g, [codomain_atom(p) for p in pieces])
    if not co_intersect(g, doms, cods).is_empty():
        raise TableError("domain and codomain of the partial bisection overlap")
    return make_table(g, pieces + [p.inverse() for p in pieces], validate=True)


# ---------------------------------------------------------------------------
# Arrows
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Arrow:
    """Groupoid arrow (target, lag, source): source maps to target."""

    target: BoundaryPoint
    lag: int
    source: BoundaryPoint


def _max_shifts(p: BoundaryPoint):
    return len(p.prefix.edges) if p.cycle is None else None


def arrow_consistent(g, ar: Arrow, budget: int = 24) -> bool:
    """Check sigma^m(target) == sigma^n(source) with m - n == lag."""
    for n in range(budget):
        m = ar.lag + n
        if m < 0:
            continue
        mt, ms = _max_shifts(ar.target), _max_shifts(ar.source)
        if mt is not None and m > mt:
            continue
        if ms is not None and n > ms:
            continue
        x, y = ar.target, ar.source
        for _ in range(m):
            x = shift_point(g, x)
        for _ in range(n):
            y = shift_point(g, y)
        if point_equal(x, y):
            return True
    return False


def contains_arrow(t: Table, ar: Arrow) -> bool:
    """True iff the table's bisection contains the arrow (lag included)."""
    g = t.graph
    _require_effective(g)
    for piece in t.pieces:
        if point_in_atom(g, ar.source, domain_atom(piece)):
            image = replace_point_prefix(g, ar.source, piece.lam, piece.mu)
            return point_equal(image, ar.target) and piece.lag == ar.lag
    return point_equal(ar.source, ar.target) and ar.lag == 0


def transposition_for_arrow(ar: Arrow, within: CompactOpen, g,
                            depth_budget: int = 16) -> Table:
    """An involution whose bisection contains the arrow, supported in ``within``.

    Builds piece (chi, F, ups) from cylinder neighbourhoods of target and
    source that are deep enough to be disjoint and to fit inside ``within``.
    """
    if point_equal(ar.source, ar.target):
        raise ArrowError("source equals target: isotropy is not supported here")
    if not (co_contains_point(g, within, ar.source)
            and co_contains_point(g, within, ar.target)):
        raise ArrowError("arrow endpoints must lie inside the given support")
    mn = _minimal_witness(g, ar, depth_budget)
    if mn is None:
        raise ArrowError("arrow is not consistent with its lag")
    m, n = mn
    for d in range(depth_budget):
        piece = _arrow_piece(g, ar, m, n, d)
        if piece is None:
            continue
        da, ca = domain_atom(piece), codomain_atom(piece)
        if atom_intersect(g, da, ca) is not None:
            continue
        if _atom_inside(g, da, within) and _atom_inside(g, ca, within):
            return involution_hat(g, [piece])
    raise ArrowError("no separating cylinders of the required lag within the depth budget")


def _minimal_witness(g, ar: Arrow, budget: int):
    for total in range(2 * budget):
        for n in range(total + 1):
            m = ar.lag + n
            if m < 0 or m + n != total:
                continue
            mt, ms = _max_shifts(ar.target), _max_shifts(ar.source)
            if mt is not None and m > mt:
                continue
            if ms is not None and n > ms:
                continue
            x, y = ar.target, ar.source
            for _ in range(m):
                x = shift_point(g, x)
            for _ in range(n):
                y = shift_point(g, y)
            if point_equal(x, y):
                return m, n
    return None


def _point_stem(g, p: BoundaryPoint, length: int):
    from .pathspace import point_edge

    edges = []
    for i in range(length):
        e = point_edge(p, i)
        if e is None:
            return None
        edges.append(e)
    return make_path(g, p.prefix.start, edges)


def _arrow_piece(g, ar: Arrow, m: int, n: int, d: int):
    mt, ms = _max_shifts(ar.target), _max_shifts(ar.source)
    if mt is not None and m + d > mt:
        return None
    if ms is not None and n + d > ms:
        return None
    chi = _point_stem(g, ar.target, m + d)
    ups = _point_stem(g, ar.source, n + d)
    from .pathspace import is_prefix, point_edge

    F = set()
    if is_prefix(chi, ups) and len(chi.edges) < len(ups.edges):
        F.add(ups.edges[len(chi.edges)])
    elif is_prefix(ups, chi) and len(ups.edges) < len(chi.edges):
        F.add(chi.edges[len(ups.edges)])
    elif chi.edges == ups.edges and chi.start == ups.start:
        return None
    # both endpoints must stay inside their atoms
    for stem, other_next in ((chi, point_edge(ar.target, len(chi.edges))),
                             (ups, point_edge(ar.source, len(ups.edges)))):
        if other_next is not None and other_next in F:
            return None
    try:
        return make_piece(g, chi, F, ups)
    except Exception:
        return None


def _atom_inside(g, a: CylinderAtom, x: CompactOpen) -> bool:
    from .pathspace import co_subtract

    return co_subtract(g, CompactOpen((a,)), x).is_empty()


# ---------------------------------------------------------------------------
# Random valid tables
# ---------------------------------------------------------------------------


def random_table(g, rng: random.Random, splits: int = 5, omega_bound: int = 3) -> Table:
    """Random element: a random atom partition of the boundary space plus a
    range-and-exclusion-preserving permutation of its atoms."""
    atoms = [atom(g, trivial_path(g, v)) for v in g.vertices]
    for _ in range(splits):
        i = rng.randrange(len(atoms))
        a = atoms[i]
        v = a.mu.rng
        candidates = [(f.id, 1) for f in g.out_singles(v) if (f.id, 1) not in a.F]
        fam = g.omega_family(v)
        if fam is not None:
            top = max([idx for (fid, idx) in a.F if fid == fam.id], default=0)
            candidates += [(fam.id, j) for j in range(1, top + omega_bound + 1)
                           if (fam.id, j) not in a.F]
        if not candidates:
            continue
        e = rng.choice(candidates)
        parts = list(atom_split(g, a, e).atoms)
        atoms[i:i + 1] = parts
    groups = {}
    for a in atoms:
        key = (a.mu.rng, tuple(sorted(a.F)))
        groups.setdefault(key, []).append(a)
    pieces = []
    for group in groups.values():
        perm = group[:]
        rng.shuffle(perm)
        for src, tgt in zip(group, perm):
            if src != tgt:
                pieces.append(Piece(tgt.mu, src.F, src.mu))
    return make_table(g, pieces, validate=False)


# ---------------------------------------------------------------------------
# JSON and literals
# ---------------------------------------------------------------------------


def table_to_json(t: Table) -> dict:
    g = t.graph
    from .pathspace import format_ref

    return {
        "pieces": [
            {
                "mu": format_path(g, p.mu),
                "F": sorted(format_ref(g, e) for e in p.F),
                "lambda": format_path(g, p.lam),
            }
            for p in t.pieces
        ]
    }


def table_from_json(g, data) -> Table:
    from .pathspace import parse_ref

    if not isinstance(data, dict) or "pieces" not in data:
        raise ParseError("table JSON must be an object with a 'pieces' list")
    pieces = []
    for rec in data["pieces"]:
        try:
            mu = parse_path(g, rec["mu"])
            lam = parse_path(g, rec["lambda"])
            F = [parse_ref(g, x) for x in rec.get("F", [])]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad piece record: {exc}") from exc
        try:
            pieces.append(make_piece(g, mu, F, lam))
        except TableError as exc:
            raise ParseError(str(exc)) from exc
    return make_table(g, pieces, validate=True)


def format_arrow(g, ar: Arrow) -> str:
    return f"({format_point(g, ar.target)} | {ar.lag} | {format_point(g, ar.source)})"


def parse_arrow(g, text: str) -> Arrow:
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise ParseError(f"bad arrow literal {text!r}")
    parts = text[1:-1].split("|")
    if len(parts) != 3:
        raise ParseError(f"arrow literal needs three '|'-separated parts: {text!r}")
    target = parse_point(g, parts[0])
    source = parse_point(g, parts[2])
    try:
        lag = int(parts[1].strip())
    except ValueError as exc:
        raise ParseError(f"bad lag in arrow literal: {parts[1]!r}") from exc
    return Arrow(target, lag, source)
