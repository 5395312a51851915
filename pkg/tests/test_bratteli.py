import itertools
import math

import pytest

import fullgroups as fg
from fullgroups.errors import AdmissibilityError, GraphError, ParseError

from conftest import make_gamma2_diagram, make_gamma24_diagram


def brute_force_order(b, N):
    """Count range-preserving permutations by filtering the whole symmetric group."""
    paths = [p for ps in b.fibers(N).values() for p in ps]
    return sum(
        1
        for perm in itertools.permutations(paths)
        if all(p.rng == q.rng for p, q in zip(paths, perm))
    )


class TestDiagram:
    def test_validation(self):
        with pytest.raises(GraphError):
            fg.BratteliDiagram(levels=(("v",),), edges=((("v", "v"),),), repeat=None)
        with pytest.raises(GraphError):  # wrap level must copy the block start
            fg.BratteliDiagram(
                levels=(("v",), ("u",), ("x",)),
                edges=((("v", "u"),), (("u", "x"),)),
                repeat=(1, 1),
            )
        with pytest.raises(GraphError):  # sink inside declared levels
            fg.BratteliDiagram(
                levels=(("v", "s"), ("u",), ("u",)),
                edges=((("v", "u"),), (("u", "u"),)),
                repeat=(1, 1),
            )

    def test_underlying_finite(self):
        b = fg.BratteliDiagram(
            levels=(("v0",), ("u",)),
            edges=((("v0", "u"), ("v0", "u")),),
            repeat=None,
        )
        g = b.underlying_graph()
        assert g.is_finite
        assert set(g.vertices) == {"v0", "u"}
        assert len(g.out_families("v0")) == 2  # parallel arcs stay separate

    def test_underlying_leveled_perfect(self):
        b = make_gamma2_diagram()
        g = b.underlying_graph()
        assert not g.is_finite
        assert fg.isolated_point_witnesses(g) == []

    def test_chain_block_semi_tail(self):
        b = fg.BratteliDiagram(
            levels=(("s",), ("t",), ("t",)),
            edges=((("s", "t"),), (("t", "t"),)),
            repeat=(1, 1),
        )
        wit = fg.isolated_point_witnesses(b.underlying_graph())
        assert any(w["kind"] == "semi-tail" for w in wit)

    def test_json_roundtrip(self):
        for b in (make_gamma2_diagram(), make_gamma24_diagram()):
            assert fg.bratteli_from_json(fg.bratteli_to_json(b)) == b


class TestGammaGroups:
    def test_small_orders(self):
        b = make_gamma2_diagram()
        assert b.gamma_order(1) == 2
        b24 = make_gamma24_diagram()
        assert b24.gamma_order(2) == math.factorial(4)

    def test_trivial_when_ranges_distinct(self):
        b = fg.BratteliDiagram(
            levels=(("v0",), ("u", "u2"), ("u", "u2")),
            edges=(
                (("v0", "u"), ("v0", "u2")),
                (("u", "u"), ("u", "u2"), ("u2", "u"), ("u2", "u2")),
            ),
            repeat=(1, 1),
        )
        assert b.gamma_order(1) == 1
        els = list(b.gamma_elements(1))
        assert len(els) == 1 and els[0].is_identity()

    def test_brute_force_matches(self):
        for b, N in ((make_gamma2_diagram(), 1), (make_gamma24_diagram(), 2)):
            assert b.gamma_order(N) == brute_force_order(b, N)

    def test_deeper_level_order(self):
        b = make_gamma2_diagram()
        # six paths to level 2, three into each block vertex
        assert b.gamma_order(2) == math.factorial(3) * math.factorial(3)
        assert b.gamma_order(2) == brute_force_order(b, 2)

    def test_element_count_matches_order(self):
        b = make_gamma2_diagram()
        assert len(list(b.gamma_elements(1))) == 2
        b24 = make_gamma24_diagram()
        assert len(list(b24.gamma_elements(2))) == 24


class TestGammaToTable:
    def test_identity_maps_to_identity(self):
        b = make_gamma2_diagram()
        el = next(e for e in b.gamma_elements(1) if e.is_identity())
        assert fg.gamma_to_table(el).pieces == ()

    def test_transposition(self):
        b = make_gamma2_diagram()
        el = next(e for e in b.gamma_elements(1) if not e.is_identity())
        t = fg.gamma_to_table(el)
        assert len(t.pieces) == 2
        assert all(p.lag == 0 for p in t.pieces)
        assert fg.is_identity(fg.compose(t, t))

    def test_all_lags_zero(self):
        b = make_gamma24_diagram()
        for el in b.gamma_elements(2):
            assert all(p.lag == 0 for p in fg.gamma_to_table(el).pieces)

    def test_extension_compatible(self):
        b = make_gamma2_diagram()
        for el in b.gamma_elements(1):
            ext = el.extend()
            assert ext.level == 2
            assert fg.germ_equal(fg.gamma_to_table(el), fg.gamma_to_table(ext))
            ext2 = ext.extend()
            assert ext2.level == 3
            assert fg.germ_equal(fg.gamma_to_table(el), fg.gamma_to_table(ext2))


class TestAfToV:
    def test_identity(self):
        b = make_gamma2_diagram()
        el = next(e for e in b.gamma_elements(1) if e.is_identity())
        assert fg.af_to_v(el).pieces == ()

    def test_transposition_order_two(self):
        b = make_gamma2_diagram()
        el = next(e for e in b.gamma_elements(1) if not e.is_identity())
        vt = fg.af_to_v(el)
        assert not fg.is_identity(vt)
        assert fg.is_identity(fg.compose(vt, vt))

    def test_homomorphism_random_pairs(self, rng):
        b = make_gamma24_diagram()
        els = list(b.gamma_elements(2))
        for _ in range(12):
            e1, e2 = rng.choice(els), rng.choice(els)
            lhs = fg.af_to_v(e1.compose(e2))
            rhs = fg.compose(fg.af_to_v(e1), fg.af_to_v(e2))
            assert fg.germ_equal(lhs, rhs)

    def test_rejects_semi_tail_diagram(self):
        b = fg.BratteliDiagram(
            levels=(("s",), ("t",), ("t",)),
            edges=((("s", "t"),), (("t", "t"),)),
            repeat=(1, 1),
        )
        el = next(b.gamma_elements(1))
        with pytest.raises(AdmissibilityError):
            fg.af_to_v(el)

    def test_injective_on_nontrivial(self):
        b = make_gamma2_diagram()
        for el in b.gamma_elements(1):
            assert fg.is_identity(fg.af_to_v(el)) == el.is_identity()


class TestElementJson:
    def test_roundtrip_via_images(self):
        b = make_gamma2_diagram()
        g = b.underlying_graph()
        el = next(e for e in b.gamma_elements(1) if not e.is_identity())
        images = {
            fg.format_path(g, p): fg.format_path(g, q)
            for p, q in el.mapping.items()
        }
        el2 = fg.gamma_element_from_json(b, {"level": 1, "images": images})
        assert el2.mapping == el.mapping

    def test_rejects_non_permutation(self):
        b = make_gamma2_diagram()
        g = b.underlying_graph()
        paths = [fg.format_path(g, p) for ps in b.fibers(1).values() for p in ps]
        with pytest.raises(ParseError):
            fg.gamma_element_from_json(
                b, {"level": 1, "images": {paths[0]: paths[1]}})
