"""Shared graphs and enumeration helpers for the test suite."""

from __future__ import annotations

import random

import pytest

import fullgroups as fg


def make_e2():
    return fg.Graph(["v"], [fg.EdgeFamily("a", "v", "v"), fg.EdgeFamily("b", "v", "v")])


def make_e_nr(n: int, r: int):
    """r vertices w1..wr; n edges w1 -> wr; chain edges f_i: w_{i+1} -> w_i."""
    vertices = [f"w{i}" for i in range(1, r + 1)]
    fams = [fg.EdgeFamily(f"e{i}", "w1", f"w{r}") for i in range(1, n + 1)]
    fams += [fg.EdgeFamily(f"f{i}", f"w{i + 1}", f"w{i}") for i in range(1, r)]
    return fg.Graph(vertices, fams)


def make_one_orbit():
    """Loop e at v, edge f: v -> w, loops g1 g2 at w."""
    return fg.Graph(
        ["v", "w"],
        [
            fg.EdgeFamily("e", "v", "v"),
            fg.EdgeFamily("f", "v", "w"),
            fg.EdgeFamily("g1", "w", "w"),
            fg.EdgeFamily("g2", "w", "w"),
        ],
    )


def make_no_cover():
    """Loop e at v, f: v -> w, loop h at w, i: w -> u, loops g1 g2 at u."""
    return fg.Graph(
        ["v", "w", "u"],
        [
            fg.EdgeFamily("e", "v", "v"),
            fg.EdgeFamily("f", "v", "w"),
            fg.EdgeFamily("h", "w", "w"),
            fg.EdgeFamily("i", "w", "u"),
            fg.EdgeFamily("g1", "u", "u"),
            fg.EdgeFamily("g2", "u", "u"),
        ],
    )


def make_e_inf():
    return fg.Graph(["w"], [fg.EdgeFamily("e", "w", "w", "omega")])


def make_two_vertex_omega():
    """Single h: w1 -> w2 plus omega loop bundles at both vertices."""
    return fg.Graph(
        ["w1", "w2"],
        [
            fg.EdgeFamily("h", "w1", "w2"),
            fg.EdgeFamily("e", "w1", "w1", "omega"),
            fg.EdgeFamily("f", "w2", "w2", "omega"),
        ],
    )


def make_leveled_chain_graph():
    """Infinite chain of vertices w1, w2, ...; loop f at odd vertices."""
    return fg.LeveledGraph(
        base_levels=[],
        block_levels=[["w{}"], ["w{}"]],
        base_families=[],
        block_families=[
            fg.TemplateFamily("e{}", "w{}", "w{}", "next", 0),
            fg.TemplateFamily("f{}", "w{}", "w{}", "same", 0),
            fg.TemplateFamily("e{}", "w{}", "w{}", "next", 1),
        ],
    )


def make_gamma2_diagram():
    """|Gamma_1| = 2: two edges v0 -> u, one v0 -> u2; full 2x2 block repeats."""
    return fg.BratteliDiagram(
        levels=(("v0",), ("u", "u2"), ("u", "u2")),
        edges=(
            (("v0", "u"), ("v0", "u"), ("v0", "u2")),
            (("u", "u"), ("u", "u2"), ("u2", "u"), ("u2", "u2")),
        ),
        repeat=(1, 1),
    )


def make_gamma24_diagram():
    """|Gamma_2| = 4! = 24: four paths into a single level-2 vertex."""
    return fg.BratteliDiagram(
        levels=(("v0",), ("x", "y"), ("z",), ("z",)),
        edges=(
            (("v0", "x"), ("v0", "y")),
            (("x", "z"), ("x", "z"), ("y", "z"), ("y", "z")),
            (("z", "z"), ("z", "z")),
        ),
        repeat=(2, 1),
    )


def path(g, start, *edges):
    """Path helper: single-family ids or (family, index) pairs."""
    refs = [e if isinstance(e, tuple) else (e, 1) for e in edges]
    return fg.make_path(g, start, refs)


def cyc_point(g, prefix, cycle):
    return fg.periodic_point(g, prefix, cycle)


def enumerate_points(g, max_prefix=3, max_cycle=2, omega_bound=2):
    """All finite boundary points and small eventually periodic points."""

    def refs_at(v):
        out = [(f.id, 1) for f in g.out_singles(v)]
        fam = g.omega_family(v)
        if fam:
            out += [(fam.id, j) for j in range(1, omega_bound + 1)]
        return out

    frontier = [fg.trivial_path(g, v) for v in g.vertices]
    all_paths = list(frontier)
    for _ in range(max_prefix + max_cycle):
        frontier = [fg.extend(g, p, r) for p in frontier for r in refs_at(p.rng)]
        all_paths += frontier
    pts = set()
    for p in all_paths:
        if g.is_singular(p.rng) and len(p.edges) <= max_prefix:
            pts.add(fg.finite_point(g, p))
    cycles_at = {}
    for c in all_paths:
        if 1 <= len(c.edges) <= max_cycle and c.start == c.rng:
            cycles_at.setdefault(c.start, []).append(c)
    for p in all_paths:
        if len(p.edges) > max_prefix:
            continue
        for c in cycles_at.get(p.rng, []):
            pts.add(fg.periodic_point(g, p, c))
    return sorted(pts, key=lambda x: (len(x.prefix.edges), str(x)))


def random_graph(rng: random.Random, max_vertices=4, max_edges=6, omega_chance=0.15):
    nv = rng.randint(1, max_vertices)
    vertices = [f"v{i}" for i in range(nv)]
    fams = []
    omega_used = set()
    for k in range(rng.randint(1, max_edges)):
        src = rng.choice(vertices)
        dst = rng.choice(vertices)
        if rng.random() < omega_chance and src not in omega_used:
            fams.append(fg.EdgeFamily(f"x{k}", src, dst, "omega"))
            omega_used.add(src)
        else:
            fams.append(fg.EdgeFamily(f"x{k}", src, dst))
    return fg.Graph(vertices, fams)


def enumerate_paths_upto(g, v, length):
    """All finite paths from v of length <= length (singles only, omega by index 1..2)."""
    out = [fg.trivial_path(g, v)]
    frontier = [fg.trivial_path(g, v)]
    for _ in range(length):
        nxt = []
        for p in frontier:
            for fam in g.out_families(p.rng):
                idxs = (1, 2) if fam.is_omega else (1,)
                for i in idxs:
                    nxt.append(fg.extend(g, p, (fam.id, i)))
        out += nxt
        frontier = nxt
    return out


@pytest.fixture
def e2():
    return make_e2()


@pytest.fixture
def one_orbit():
    return make_one_orbit()


@pytest.fixture
def e_inf():
    return make_e_inf()


@pytest.fixture
def rng():
    return random.Random(20240817)
