"""Embedding of graph full groups into the binary full group (Thompson's V).

The binary graph has one vertex and two loops ``a``, ``b``.  An i-way choice
is encoded by the maximal prefix code ``b, ab, aab, ..., a^{i-2}b, a^{i-1}``
(for ``i`` infinite the last word is dropped and the code covers everything
except ``a^inf``).  Concatenating the code words of a labeled graph's vertex
and edge choices gives a word map ``word_of_path`` and a point map
``point_map`` conjugating the graph's full group into the binary one.

The same code yields generator-level images for the associated algebras:
vertex projections map to diagonal monomials and edge partial isometries to
monomials ``s_alpha s_beta*``; ``ck_check`` verifies the defining relations
symbolically.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import AdmissibilityError, ParseError, PathError
from .graph import OMEGA, EdgeFamily, Graph, check_condition_L, has_semi_tails, has_sinks
from .pathspace import BoundaryPoint, FinitePath, make_path, periodic_point
from .tables import Piece, Table, make_table

E2 = Graph(
    ["v"],
    [EdgeFamily("a", "v", "v"), EdgeFamily("b", "v", "v")],
)


def binary_path(word: str) -> FinitePath:
    """A finite path over the binary graph from a string of a's and b's."""
    for ch in word:
        if ch not in "ab":
            raise PathError(f"not a binary word: {word!r}")
    return make_path(E2, "v", [(ch, 1) for ch in word])


def binary_point(prefix: str, cycle: str) -> BoundaryPoint:
    return periodic_point(E2, binary_path(prefix), binary_path(cycle))


# ---------------------------------------------------------------------------
# The prefix code
# ---------------------------------------------------------------------------


def code_word(j: int, i) -> str:
    """The j-th word of the i-way prefix code (i may be OMEGA)."""
    if j < 1:
        raise PathError("code index must be positive")
    if i != OMEGA and j > i:
        raise PathError(f"code index {j} exceeds alphabet size {i}")
    if i == 1:
        return ""
    if j == i:
        return "a" * (j - 1)
    if j == 1:
        return "b"
    return "a" * (j - 1) + "b"


def code_partition_check(i, depth: int) -> bool:
    """The code words are prefix-incomparable and tile all binary words of
    the given depth (all but ``a^depth`` when i is OMEGA)."""
    if i == OMEGA:
        words = [code_word(j, i) for j in range(1, depth + 1)]
    else:
        words = [code_word(j, i) for j in range(1, i + 1)]
    if any(len(w) > depth for w in words):
        return False
    for xi, x in enumerate(words):
        for yi, y in enumerate(words):
            if xi != yi and y.startswith(x):
                return False
    uncovered = []
    for k in range(2 ** depth):
        w = format(k, f"0{depth}b").replace("0", "a").replace("1", "b") if depth else ""
        hits = sum(1 for c in words if w.startswith(c))
        if hits != 1:
            uncovered.append(w)
    if i == OMEGA:
        return uncovered == ["a" * depth]
    return not uncovered


# ---------------------------------------------------------------------------
# Labelings
# ---------------------------------------------------------------------------


class Labeling:
    """Vertex order and per-vertex single-edge order of a graph.

    Defaults to declaration order.  Omega families always label last, their
    edges numbered after the singles.  Leveled graphs are enumerated level by
    level over the naturals and do not admit custom orders.
    """

    def __init__(self, graph, vertex_order=None, edge_orders=None):
        self.graph = graph
        if graph.is_finite:
            self.vertex_order = tuple(vertex_order) if vertex_order else graph.vertices
            if sorted(self.vertex_order) != sorted(graph.vertices):
                raise PathError("vertex order must be a permutation of the vertices")
        else:
            if vertex_order is not None:
                raise PathError("leveled graphs use the level-by-level labeling")
            self.vertex_order = None
        self.edge_orders = {}
        for v, ids in (edge_orders or {}).items():
            declared = [f.id for f in graph.out_singles(v)]
            if sorted(ids) != sorted(declared):
                raise PathError(f"edge order at {v!r} must permute its single edges")
            self.edge_orders[v] = tuple(ids)

    def _key(self):
        return (self.graph, self.vertex_order,
                tuple(sorted(self.edge_orders.items())))

    def __eq__(self, other):
        return isinstance(other, Labeling) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @property
    def n(self):
        return self.graph.vertex_count() if self.graph.is_finite else OMEGA

    def vertex_number(self, name: str) -> int:
        if self.vertex_order is not None:
            return self.vertex_order.index(name) + 1
        return self.graph.vertex_index(name)

    def vertex_by_number(self, i: int) -> str:
        if self.vertex_order is not None:
            return self.vertex_order[i - 1]
        return self.graph.vertex_by_index(i)

    def k(self, vertex: str):
        return self.graph.out_degree(vertex)

    def singles_at(self, vertex: str):
        if vertex in self.edge_orders:
            return self.edge_orders[vertex]
        return tuple(f.id for f in self.graph.out_singles(vertex))

    def edge_number(self, ref) -> int:
        fid, idx = ref
        fam = self.graph.family(fid)
        singles = self.singles_at(fam.source)
        if fam.is_omega:
            return len(singles) + idx
        return singles.index(fid) + 1

    def edge_by_number(self, vertex: str, j: int):
        singles = self.singles_at(vertex)
        if j <= len(singles):
            return (singles[j - 1], 1)
        fam = self.graph.omega_family(vertex)
        if fam is None:
            raise PathError(f"vertex {vertex!r} has no edge #{j}")
        return (fam.id, j - len(singles))


def default_labeling(g) -> Labeling:
    return Labeling(g)


@lru_cache(maxsize=None)
def _admissibility_failure(g):
    if has_sinks(g):
        return "graph has a sink"
    if not check_condition_L(g).holds:
        return "graph has an exitless cycle"
    if has_semi_tails(g):
        return "graph has a semi-tail"
    return None


def require_admissible(g) -> None:
    """No sinks, condition (L), no semi-tails: the embedding hypotheses."""
    failure = _admissibility_failure(g)
    if failure is not None:
        raise AdmissibilityError(failure)


# ---------------------------------------------------------------------------
# The word and point maps
# ---------------------------------------------------------------------------


def word_of_vertex(v: str, lab: Labeling) -> str:
    require_admissible(lab.graph)
    return code_word(lab.vertex_number(v), lab.n)


def edge_word(ref, lab: Labeling) -> str:
    fam = lab.graph.family(ref[0])
    return code_word(lab.edge_number(ref), lab.k(fam.source))


def word_of_path(mu: FinitePath, lab: Labeling) -> str:
    """Vertex code word of the start followed by the edge code words."""
    require_admissible(lab.graph)
    return word_of_vertex(mu.start, lab) + "".join(edge_word(e, lab) for e in mu.edges)


def word_of_edges(mu: FinitePath, lab: Labeling) -> str:
    """Edge code words only (used for cycle tails)."""
    require_admissible(lab.graph)
    return "".join(edge_word(e, lab) for e in mu.edges)


def point_map(p: BoundaryPoint, lab: Labeling) -> BoundaryPoint:
    """Image of a representable boundary point in the binary path space."""
    require_admissible(lab.graph)
    if p.cycle is None:
        return binary_point(word_of_path(p.prefix, lab), "a")
    cyc = word_of_edges(p.cycle, lab)
    if not cyc:
        raise AdmissibilityError("cycle with no exit encountered in the point map")
    return binary_point(word_of_path(p.prefix, lab), cyc)


def _prefix_f_level(piece_F, lab: Labeling):
    """Largest labeled index in F, plus the indices below it that stay."""
    if not piece_F:
        return 0, []
    numbers = sorted(lab.edge_number(e) for e in piece_F)
    top = numbers[-1]
    kept = [j for j in range(1, top) if j not in set(numbers)]
    return top, kept


def embed_table(t: Table, lab: Labeling) -> Table:
    """Image of a prefix-exchange table in the binary full group.

    A piece with exclusion set F splits into a prefix-exclusion piece
    (appending ``a^l`` for the top excluded index l) plus one piece per kept
    smaller index; each stem then maps through the word map.
    """
    g = t.graph
    require_admissible(g)
    out = []
    for p in t.pieces:
        w = p.mu.rng
        mu_w = word_of_path(p.mu, lab)
        lam_w = word_of_path(p.lam, lab)
        top, kept = _prefix_f_level(p.F, lab)
        # the a^top residual is empty exactly when F reaches a regular
        # vertex's last labeled edge
        if not (g.is_regular(w) and top == g.out_degree(w)):
            out.append(Piece(binary_path(mu_w + "a" * top), frozenset(),
                             binary_path(lam_w + "a" * top)))
        for j in kept:
            ej = lab.edge_by_number(w, j)
            wj = edge_word(ej, lab)
            out.append(Piece(binary_path(mu_w + wj), frozenset(),
                             binary_path(lam_w + wj)))
    out = [p for p in out if p.mu != p.lam]
    return make_table(E2, out, validate=True)


# ---------------------------------------------------------------------------
# Monomials and formal sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Monomial:
    """s_alpha s_beta* over the binary alphabet; None stands for zero."""

    alpha: str
    beta: str

    def star(self) -> "Monomial":
        return Monomial(self.beta, self.alpha)

    def is_projection(self) -> bool:
        return self.alpha == self.beta


ONE = Monomial("", "")


def mono_mult(x, y):
    """Product of monomials with the usual contraction; None is absorbing."""
    if x is None or y is None:
        return None
    if y.alpha.startswith(x.beta):
        return Monomial(x.alpha + y.alpha[len(x.beta):], y.beta)
    if x.beta.startswith(y.alpha):
        return Monomial(x.alpha, y.beta + x.beta[len(y.alpha):])
    return None


class FormalSum:
    """Integer combination of monomials kept in collected form."""

    def __init__(self, terms=None):
        self.terms = {}
        for mono, c in (terms or {}).items():
            if c:
                self.terms[mono] = self.terms.get(mono, 0) + c

    @classmethod
    def of(cls, *monos):
        s = cls()
        for m in monos:
            if m is not None:
                s.terms[m] = s.terms.get(m, 0) + 1
        return s

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return FormalSum({m: c for m, c in out.items() if c})

    def __sub__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) - c
        return FormalSum({m: c for m, c in out.items() if c})

    def __mul__(self, other):
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mult(m1, m2)
                if m is not None:
                    out[m] = out.get(m, 0) + c1 * c2
        return FormalSum({m: c for m, c in out.items() if c})

    def reduced(self) -> "FormalSum":
        """Collect sibling pairs: c(s_xa s_ya*) + c(s_xb s_yb*) -> c(s_x s_y*)."""
        terms = {m: c for m, c in self.terms.items() if c}
        changed = True
        while changed:
            changed = False
            for m, c in list(terms.items()):
                if not (m.alpha.endswith("a") and m.beta.endswith("a")):
                    continue
                sib = Monomial(m.alpha[:-1] + "b", m.beta[:-1] + "b")
                c2 = terms.get(sib, 0)
                if not c2 or (c > 0) != (c2 > 0):
                    continue
                step = min(abs(c), abs(c2)) * (1 if c > 0 else -1)
                parent = Monomial(m.alpha[:-1], m.beta[:-1])
                for key, delta in ((m, -step), (sib, -step), (parent, step)):
                    terms[key] = terms.get(key, 0) + delta
                    if not terms[key]:
                        del terms[key]
                changed = True
                break
        return FormalSum(terms)

    def is_zero(self) -> bool:
        return not self.reduced().terms

    def equals(self, other) -> bool:
        return (self - other).is_zero()

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*({m.alpha}|{m.beta})" for m, c in sorted(
            self.terms.items(), key=lambda kv: (kv[0].alpha, kv[0].beta)))


# ---------------------------------------------------------------------------
# Generator emission
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VertexImage:
    vertex: str
    mono: Monomial


@dataclass(frozen=True)
class EdgeImage:
    name: str        # display name: family id, or id[j] for omega edges
    ref: tuple
    source: str
    range: str
    mono: Monomial


@dataclass(frozen=True)
class GeneratorImage:
    vertices: tuple
    edges: tuple


def emit_generators(g, lab: Labeling, edge_bound: int = 10) -> GeneratorImage:
    """Images of the vertex projections and edge isometries.

    Omega families are truncated at ``edge_bound`` edges; for leveled graphs
    the same bound truncates the vertex enumeration.
    """
    require_admissible(g)
    if g.is_finite:
        vertex_names = [lab.vertex_by_number(i) for i in range(1, g.vertex_count() + 1)]
    else:
        vertex_names = [g.vertex_by_index(i) for i in range(1, edge_bound + 1)]
    vimages = []
    for v in vertex_names:
        w = word_of_vertex(v, lab)
        vimages.append(VertexImage(v, Monomial(w, w)))
    eimages = []
    for v in vertex_names:
        refs = [(fid, 1) for fid in lab.singles_at(v)]
        fam = g.omega_family(v)
        if fam is not None:
            refs += [(fam.id, j) for j in range(1, edge_bound + 1)]
        for ref in refs:
            fam_obj = g.family(ref[0])
            word = word_of_vertex(v, lab) + edge_word(ref, lab)
            rword = word_of_vertex(fam_obj.range, lab)
            name = f"{ref[0]}[{ref[1]}]" if fam_obj.is_omega else ref[0]
            eimages.append(EdgeImage(name, ref, v, fam_obj.range, Monomial(word, rword)))
    return GeneratorImage(tuple(vimages), tuple(eimages))


def _mono_text(m: Monomial) -> str:
    if m.alpha == "" and m.beta == "":
        return "1"
    if m.beta == "":
        return f"s({m.alpha})"
    if m.alpha == "":
        return f"s({m.beta})*"
    return f"s({m.alpha}) s({m.beta})*"


def format_generator_image(img: GeneratorImage) -> str:
    lines = [f"p[{v.vertex}] -> {_mono_text(v.mono)}" for v in img.vertices]
    lines += [f"s[{e.name}] -> {_mono_text(e.mono)}" for e in img.edges]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Relation checking
# ---------------------------------------------------------------------------


def ck_check(g, img: GeneratorImage):
    """Verify the graph-algebra relations on the emitted images.

    Checks: vertex images are projections, mutually orthogonal, and (finite
    vertex set) sum to the identity; edges satisfy s_e* s_e = p_r(e),
    p_s(e) s_e = s_e, and same-vertex orthogonality; regular vertices satisfy
    the reconstruction identity sum_e s_e s_e* = p_v.  Omega families are
    only sampled up to the emitted bound.
    """
    failures = []
    vmap = {v.vertex: v.mono for v in img.vertices}

    def fail(msg):
        failures.append(msg)

    for v in img.vertices:
        if not v.mono.is_projection():
            fail(f"p[{v.vertex}] is not a projection")
    for i, v1 in enumerate(img.vertices):
        for v2 in img.vertices[i + 1:]:
            if mono_mult(v1.mono, v2.mono) is not None:
                fail(f"p[{v1.vertex}] p[{v2.vertex}] != 0")
    if g.is_finite:
        total = FormalSum()
        for v in img.vertices:
            total = total + FormalSum.of(v.mono)
        if not total.equals(FormalSum.of(ONE)):
            fail("vertex projections do not sum to 1")
    for e in img.edges:
        if e.range in vmap:
            left = mono_mult(e.mono.star(), e.mono)
            if left != vmap[e.range]:
                fail(f"s[{e.name}]* s[{e.name}] != p[{e.range}]")
        if e.source in vmap:
            if mono_mult(vmap[e.source], e.mono) != e.mono:
                fail(f"p[{e.source}] s[{e.name}] != s[{e.name}]")
    by_source = {}
    for e in img.edges:
        by_source.setdefault(e.source, []).append(e)
    for v, edges in by_source.items():
        for i, e1 in enumerate(edges):
            for e2 in edges[i + 1:]:
                if mono_mult(e1.mono.star(), e2.mono) is not None:
                    fail(f"s[{e1.name}]* s[{e2.name}] != 0")
        if g.is_finite and g.is_regular(v) and v in vmap:
            total = FormalSum()
            for e in edges:
                total = total + FormalSum.of(mono_mult(e.mono, e.mono.star()))
            if not total.equals(FormalSum.of(vmap[v])):
                fail(f"sum of ranges at {v} != p[{v}]")
    return (not failures), failures


# ---------------------------------------------------------------------------
# Labeling files
# ---------------------------------------------------------------------------


def labeling_from_json(g, data) -> Labeling:
    if data is None:
        return default_labeling(g)
    if not isinstance(data, dict):
        raise ParseError("labeling file must hold a JSON object")
    try:
        return Labeling(g, data.get("vertices"), data.get("edges"))
    except PathError as exc:
        raise ParseError(str(exc)) from exc
