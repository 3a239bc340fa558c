import itertools

import pytest

from oracles import brute_filters, brute_topologies, category_axioms_hold, parse_map, parse_structure, preimage
from topofam.corpus import counterexamples as cx
from topofam.corpus.builders import build_finfilt, build_finset, build_fintop
from topofam.corpus.random_models import random_model, random_pseudofunctor
from topofam.corpus.registry import (
    PACKAGE_DATA,
    build_counterexamples,
    corpus_dir,
    corpus_entries,
    prefib_not_fib_model,
    pretop_not_top_model,
    subject_context,
    write_corpus,
)
from topofam.families import epi_masks, strict_epi_masks
from topofam.fibered import fiber
from topofam.fincat import InputError, validate_category, validate_functor
from topofam.grothendieck import validate_pseudofunctor
from topofam.modelfile import ModelFile, print_model
from topofam.topological import classify, self_duality_check


def test_finset_sizes():
    one = build_finset(1)
    assert len(one.objects) == 2
    non_identity = [a for a in one.arrow_ids if a not in one.identities.values()]
    # functions 0→0, 0→1, 1→1: only the empty map 0→1 is not an identity
    assert len(non_identity) == sum(m ** n for n in range(2) for m in range(2)) - 2 == 1
    two = build_finset(2)
    assert len(two.hom("2", "2")) == 2 ** 2
    for n, m in itertools.product(range(3), repeat=2):
        assert len(two.hom(str(n), str(m))) == m ** n
    assert category_axioms_hold(two)


def test_finset_epis_are_strict(finset2):
    for x in finset2.objects:
        assert (epi_masks(finset2, x) == strict_epi_masks(finset2, x)).all()


@pytest.mark.parametrize("bad", [0, 3])
def test_builder_size_limits(bad):
    with pytest.raises(InputError):
        build_fintop(bad)
    with pytest.raises(InputError):
        build_finfilt(bad)


@pytest.mark.parametrize("build,brute", [(build_fintop, brute_topologies), (build_finfilt, brute_filters)])
def test_structured_builders_match_oracle(build, brute):
    ctx = build(2)
    assert validate_category(ctx.T).ok and validate_functor(ctx.u).ok
    for n in range(3):
        objs = fiber(ctx, str(n)).objects
        assert {parse_structure(x)[1] for x in objs} == set(brute(n))
    for x in ctx.T.objects:
        for y in ctx.T.objects:
            (n, sx), (m, sy) = parse_structure(x), parse_structure(y)
            maps = [f for f in itertools.product(range(m), repeat=n)
                    if all(preimage(f, v) in sx for v in sy)]
            hom = ctx.T.hom(x, y)
            assert sorted(parse_map(a) for a in hom) == sorted(maps)


def test_point_fibres(fintop, finfilt):
    assert len(fiber(fintop, "1").objects) == 1
    assert len(fiber(finfilt, "1").objects) == 2


@pytest.mark.parametrize("entry", corpus_entries(), ids=lambda e: e.name)
def test_entry_flags_match_classification(entry):
    model = entry.build()
    assert set(model.expectations) and all(v == entry.expected for v in model.expectations.values())
    for name in model.expectations:
        assert classify(subject_context(model, name)).flags == entry.expected


def test_counterexamples_separate_the_notions():
    flags = {e.name: e.expected for e in build_counterexamples()}
    assert flags["antichain"]["fibration"] and not flags["antichain"]["pretopological"]
    assert flags["prefib_not_fib"]["prefibration"] and not flags["prefib_not_fib"]["fibration"]
    assert flags["pretop_not_top"]["pretopological"] and not flags["pretop_not_top"]["topological"]


def test_searches_reproduce_golden_files():
    assert print_model(prefib_not_fib_model()) == (PACKAGE_DATA / "prefib_not_fib.model").read_text(encoding="utf-8")
    assert print_model(pretop_not_top_model()) == (PACKAGE_DATA / "pretop_not_top.model").read_text(encoding="utf-8")


def test_search_statistics():
    u, examined = cx.search_prefibration_not_fibration()
    assert examined == 1284
    assert sorted(u.source.objects) == ["r0", "r1", "s0", "t0"]
    p, examined = cx.search_pretopological_not_topological()
    assert examined == 7
    assert p.transition["s<=t"] == {"0": "0"}


def test_search_bound_exhausted():
    assert cx.search_prefibration_not_fibration(max_size=2) is None
    assert cx.search_pretopological_not_topological(max_size=2) is None


def test_write_corpus_matches_package_data(tmp_path):
    written = write_corpus(tmp_path)
    assert sorted(p.name for p in written) == sorted(p.name for p in PACKAGE_DATA.glob("*.model"))
    for p in written:
        assert p.read_text(encoding="utf-8") == (PACKAGE_DATA / p.name).read_text(encoding="utf-8"), p.name


def test_corpus_dir_override(monkeypatch, tmp_path):
    monkeypatch.delenv("TOPOFAM_CORPUS_DIR", raising=False)
    assert corpus_dir() == PACKAGE_DATA
    monkeypatch.setenv("TOPOFAM_CORPUS_DIR", str(tmp_path))
    assert corpus_dir() == tmp_path


def _dump(ctx):
    m = ModelFile()
    m.add_functor(ctx.u)
    return print_model(m)


def test_random_model_is_deterministic():
    for seed in (0, 1, 17, 999):
        assert _dump(random_model(seed)) == _dump(random_model(seed))
    assert _dump(random_model(1)) != _dump(random_model(2))


def test_random_models_are_valid():
    for seed in range(1000):
        ctx = random_model(seed)
        assert validate_category(ctx.T).ok and validate_category(ctx.S).ok and validate_functor(ctx.u).ok
    for seed in range(200):
        assert validate_pseudofunctor(random_pseudofunctor(seed)).ok


def test_fuzz_campaign_routes_and_self_duality():
    # classify raises RouteDisagreement on any route mismatch
    for seed in range(1000):
        ctx = random_model(seed)
        classify(ctx)
        assert self_duality_check(ctx), seed
