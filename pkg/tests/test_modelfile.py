import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import small_categories
from topofam.corpus.registry import PACKAGE_DATA, corpus_entries
from topofam.fincat import identity_functor
from topofam.modelfile import ModelFile, ParseError, load_model, parse_model, print_model, quote

SMALL = """\
# an arrow category
category "A"
  object "x"
  object "y"
  arrow "idx": "x" -> "x"
  arrow "idy": "y" -> "y"
  arrow "f": "x" -> "y"
  identity "x" = "idx"
  identity "y" = "idy"
  compose "f" "idx" = "f"
  compose "idx" "idx" = "idx"
  compose "idy" "f" = "f"
  compose "idy" "idy" = "idy"
end

functor "id": "A" -> "A"
  object "x" -> "x"
  object "y" -> "y"
  arrow "idx" -> "idx"
  arrow "idy" -> "idy"
  arrow "f" -> "f"
end

expect "id"
  flag "topological" = true
end
"""


def test_parse_small_model():
    m = parse_model(SMALL)
    assert set(m.categories) == {"A"}
    assert m.categories["A"].arrows["f"] == ("x", "y")
    assert m.functors["id"].ar("f") == "f"
    assert m.expectations == {"id": {"topological": True}}


def test_canonical_form_is_a_fixed_point():
    text = print_model(parse_model(SMALL))
    assert print_model(parse_model(text)) == text


@pytest.mark.parametrize("entry", corpus_entries(), ids=lambda e: e.name)
def test_golden_files_round_trip(entry):
    text = (PACKAGE_DATA / entry.filename).read_text(encoding="utf-8")
    assert print_model(parse_model(text)) == text


@given(small_categories())
def test_round_trip_random_categories(c):
    m = ModelFile()
    m.add_functor(identity_functor(c))
    text = print_model(m)
    back = parse_model(text)
    cat = back.categories[c.name]
    assert dict(cat.arrows) == dict(c.arrows)
    assert dict(cat.compose) == dict(c.compose)
    assert dict(cat.identities) == dict(c.identities)
    assert print_model(back) == text


@given(st.text(alphabet=st.characters(blacklist_categories=("Cs", "Cc")), max_size=12))
def test_quote_round_trips_any_name(name):
    text = f"category {quote(name)}\nend\n"
    assert list(parse_model(text).categories) == [name]


@pytest.mark.parametrize("text,line,col", [
    ('category "A"\n  object x\nend\n', 2, 10),
    ('category "A"\n  bogus "x"\nend\n', 2, 3),
    ('category "A"\n  object "x"\n', 1, 1),
    ('category "A\nend\n', 1, 10),
    ('widget "A"\nend\n', 1, 1),
    ('category "A"\n  object "x" "y"\nend\n', 2, 14),
    ('category "A"\nend junk\n', 2, 5),
    ('category "A"\n  object "a\\qb"\nend\n', 2, 12),
    ('category "A"\nend\nexpect "A"\n  flag "shiny" = true\nend\n', 4, 3),
    ('category "A"\nend\nexpect "A"\n  flag "faithful" = maybe\nend\n', 4, 21),
    ('functor "u": "A" -> "B"\nend\n', 1, 1),
    ('category "A"\n  arrow "f": "x" -> "y"\n  arrow "f": "x" -> "y"\nend\n', 3, 3),
])
def test_parse_errors_carry_position(text, line, col):
    with pytest.raises(ParseError) as exc:
        parse_model(text)
    assert (exc.value.line, exc.value.col) == (line, col), exc.value


def test_unknown_base_object_in_pseudofunctor():
    text = 'category "B"\n  object "s"\nend\npseudofunctor "P" over "B"\n  element "t" "0"\nend\n'
    with pytest.raises(ParseError) as exc:
        parse_model(text)
    assert exc.value.line == 5


def test_load_model(tmp_path):
    path = tmp_path / "m.model"
    path.write_text(SMALL, encoding="utf-8")
    assert set(load_model(path).functors) == {"id"}
