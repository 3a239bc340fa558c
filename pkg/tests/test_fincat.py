import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import category_axioms_hold
from strategies import mutated_categories, small_categories
from topofam.corpus import small
from topofam.fincat import (
    Cocone,
    FinCat,
    FunctorMap,
    InputError,
    colimit_cocones,
    cones,
    cocones,
    default_shapes,
    diagrams,
    identity_functor,
    is_colimit_cocone,
    is_faithful,
    is_limit_cone,
    left_adjoint,
    opposite,
    opposite_functor,
    poset_category,
    right_adjoint,
    shape_discrete,
    validate_category,
    validate_functor,
    verify_adjunction,
)


def test_terminal_category_valid():
    assert validate_category(small.terminal()).ok


def test_identity_law_violation_cites_pair():
    c = poset_category(["a", "b"], [("a", "b")])
    comp = dict(c.compose)
    comp[("a<=b", "a<=a")] = "a<=a"
    bad = FinCat(c.objects, c.arrows, c.identities, comp, "bad")
    report = validate_category(bad)
    assert not report.ok
    # the first problem is the ill-typed composite itself
    assert ("a<=b", "a<=a", "a<=a") in [v.witness for v in report.violations]


def test_identity_law_violation_with_well_typed_composite():
    m = small.idempotent_monoid()
    comp = dict(m.compose)
    comp[("e", "1")] = "1"
    report = validate_category(FinCat(m.objects, m.arrows, m.identities, comp, "bad"))
    assert "identity law" in report.kinds()
    assert ("e", "1") in [v.witness for v in report.violations if v.kind == "identity law"]


def test_associativity_violation_reports_triple():
    # three arrows on one object: 1, a, b with a∘a = b, b∘a = a but a∘b = b
    arrows = {"1": ("m", "m"), "a": ("m", "m"), "b": ("m", "m")}
    comp = {("1", x): x for x in arrows} | {(x, "1"): x for x in arrows}
    comp.update({("a", "a"): "b", ("a", "b"): "b", ("b", "a"): "a", ("b", "b"): "b"})
    report = validate_category(FinCat(("m",), arrows, {"m": "1"}, comp, "M"))
    assert "associativity" in report.kinds()
    assert all(len(v.witness) == 3 for v in report.violations if v.kind == "associativity")


def test_corpus_categories_valid(fintop, finfilt, finset2):
    for c in (fintop.T, fintop.S, finfilt.T, finset2):
        assert validate_category(c).ok


def test_validate_functor_examples(fintop):
    c = small.idempotent_monoid()
    assert validate_functor(identity_functor(c)).ok
    bad = FunctorMap(c, c, {"m": "m"}, {"1": "e", "e": "e"}, "bad")
    assert "identity not preserved" in validate_functor(bad).kinds()
    assert validate_functor(fintop.u).ok


def test_hom_examples(finset2):
    t = small.terminal()
    assert t.hom("*", "*") == ("id*",)
    assert len(finset2.hom("2", "2")) == 4
    d = small.discrete(["a", "b"])
    assert d.hom("a", "b") == ()
    with pytest.raises(InputError):
        d.hom("a", "zzz")


def test_opposite_examples(fintop):
    c = poset_category(["a", "b"], [("a", "b")])
    assert opposite(opposite(c)) is c
    assert c.op.arrows["a<=b"] == ("b", "a")
    assert validate_functor(opposite_functor(fintop.u)).ok


def test_is_faithful_examples(fintop):
    from topofam.corpus.counterexamples import collapse_parallel_pair
    assert is_faithful(identity_functor(small.parallel_pair()))
    assert not is_faithful(collapse_parallel_pair())
    assert is_faithful(fintop.u)


def test_colimit_examples(finset2):
    one = shape_discrete(1)
    d = next(diagrams(one, finset2))
    x = d.ob("j0")
    assert is_colimit_cocone(finset2, d, Cocone(x, {"j0": finset2.id(x)}))
    two = shape_discrete(2)
    pair = FunctorMap(two, finset2, {"j0": "1", "j1": "1"}, {"id_j0": "1->1:0", "id_j1": "1->1:0"}, "D")
    assert is_colimit_cocone(finset2, pair, Cocone("2", {"j0": "1->2:0", "j1": "1->2:1"}))
    assert not is_colimit_cocone(finset2, pair, Cocone("1", {"j0": "1->1:0", "j1": "1->1:0"}))
    apexes = {k.apex for k in colimit_cocones(finset2, pair)}
    assert apexes == {"2"}


def test_fintop_forgetful_has_both_adjoints(fintop):
    found = left_adjoint(fintop.u)
    assert found is not None
    left, unit = found
    # the left adjoint picks discrete spaces
    assert left.ob("2") == "2[-,0,1,01]"
    right, counit = right_adjoint(fintop.u)
    assert right.ob("2") == "2[-,01]"
    # the left adjoint's counit: identity-carried maps from the discrete space
    counit_l = {x: fintop.T.hom(left.ob(fintop.u.ob(x)), x) for x in fintop.T.objects}
    chosen = {x: next(a for a in arrows if a.endswith(":" + "".join(str(i) for i in range(int(x[0])))))
              for x, arrows in counit_l.items()}
    assert verify_adjunction(left, fintop.u, unit, chosen).ok


@given(mutated_categories())
def test_validator_matches_direct_recheck(c):
    assert validate_category(c).ok == category_axioms_hold(c)


@given(small_categories())
def test_opposite_is_involution(c):
    assert opposite(opposite(c)) is c
    assert validate_category(c.op).ok
    assert all(c.op.comp(f, g) == c.comp(g, f) for (g, f) in c.compose)


@given(small_categories(), st.data())
def test_faithfulness_is_self_dual(c, data):
    from topofam.corpus.random_models import random_model
    u = random_model(data.draw(st.integers(0, 10_000))).u
    assert is_faithful(u) == is_faithful(opposite_functor(u))
    collapse = small.collapse(c)
    assert is_faithful(collapse) == is_faithful(opposite_functor(collapse))


@given(small_categories(), st.data())
def test_colimit_limit_duality(c, data):
    shape = data.draw(st.sampled_from(default_shapes(3)))
    ds = list(diagrams(shape, c))
    if not ds:
        return
    d = data.draw(st.sampled_from(ds))
    dop = opposite_functor(d)
    for apex in c.objects:
        for legs in cocones(c, d, apex)[:4]:
            k = Cocone(apex, legs)
            assert is_colimit_cocone(c, d, k) == is_limit_cone(c.op, dop, k)
        assert sorted(map(sorted, (l.items() for l in cocones(c, d, apex)))) == \
            sorted(map(sorted, (l.items() for l in cones(c.op, dop, apex))))
