"""Omniclass parsing: exact fixtures plus a generated round-trip property."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twinfm.errors import MalformedCode
from twinfm.omniclass import (
    MAX_LEVELS,
    OmniclassCode,
    VALID_TABLES,
    canonical,
    normalize,
    parse_omniclass,
    require_table,
)

KNOWN_CODES = [
    ("13-55 11 00 Office Spaces", 13, (55, 11, 0), "Office Spaces"),
    ("13-23 17 00 Restroom", 13, (23, 17, 0), "Restroom"),
    ("13-57 17 13 Break Room", 13, (57, 17, 13), "Break Room"),
    ("23-04 50 Electrical", 23, (4, 50), "Electrical"),
    ("23-35 47 00 Electrical Lighting", 23, (35, 47, 0), "Electrical Lighting"),
]


@pytest.mark.parametrize("text,table,levels,title", KNOWN_CODES)
def test_known_codes_parse(text, table, levels, title):
    code = parse_omniclass(text)
    assert code.table == table
    assert code.levels == levels
    assert code.title == title


@pytest.mark.parametrize("text,_table,_levels,_title", KNOWN_CODES)
def test_known_codes_render_verbatim(text, _table, _levels, _title):
    assert parse_omniclass(text).render() == text


def test_normalize_collapses_whitespace():
    assert normalize("  13-55   11  00   Office  Spaces ") == "13-55 11 00 Office Spaces"


def test_canonical_of_messy_input():
    assert canonical(" 13-55  11 00  Office Spaces") == "13-55 11 00 Office Spaces"


@pytest.mark.parametrize("bad", [
    "",
    "   ",
    "14-55 11 00 X",          # table not 13/23
    "13 55 11 00 X",          # missing hyphen head
    "13-5 11 X",              # one-digit group
    "13-555 11 X",            # three-digit group
    "1355 11 00 X",           # no head at all
    "-55 11 00 X",
    None,
    42,
])
def test_malformed_codes_raise(bad):
    with pytest.raises(MalformedCode):
        parse_omniclass(bad)


def test_titleless_code_renders_head_only():
    code = parse_omniclass("23-04 50")
    assert code.title == ""
    assert code.render() == "23-04 50"


def test_greedy_groups_stop_at_four():
    code = parse_omniclass("13-11 22 33 44 55 Extra")
    assert code.levels == (11, 22, 33, 44)
    assert code.title == "55 Extra"


def test_numeric_looking_title_tail():
    # a fifth two-digit token belongs to the title once levels are full
    code = parse_omniclass("23-31 21 15 17 19 Deep Plumbing")
    assert code.levels == (31, 21, 15, 17)
    assert code.title == "19 Deep Plumbing"


def test_require_table():
    assert require_table("13-55 11 00 Office Spaces", 13).table == 13
    with pytest.raises(MalformedCode):
        require_table("23-35 47 00 Electrical Lighting", 13)


_titles = st.text(
    alphabet=st.characters(whitelist_categories=("Lu", "Ll"), max_codepoint=0x24F),
    min_size=1, max_size=12,
).filter(lambda s: s.strip() == s and s)


@st.composite
def omniclass_codes(draw):
    table = draw(st.sampled_from(VALID_TABLES))
    levels = draw(st.lists(st.integers(0, 99), min_size=1, max_size=MAX_LEVELS))
    # words that are exactly two digits would be eaten as level groups, so
    # only generate alphabetic title words (the realistic shape anyway)
    words = draw(st.lists(_titles, min_size=0, max_size=4))
    return OmniclassCode(table=table, levels=tuple(levels), title=" ".join(words))


@settings(max_examples=1000)
@given(omniclass_codes())
def test_round_trip_property(code):
    rendered = code.render()
    parsed = parse_omniclass(rendered)
    assert parsed == code
    assert parsed.render() == rendered
    assert canonical(rendered) == rendered


@settings(max_examples=300)
@given(omniclass_codes(), st.integers(0, 6), st.integers(0, 6))
def test_round_trip_survives_extra_spacing(code, pad_a, pad_b):
    rendered = code.render()
    messy = rendered.replace(" ", " " * (1 + pad_a), 1) + " " * pad_b
    assert canonical(messy) == rendered
