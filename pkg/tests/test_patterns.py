"""Run-length pattern parsing, emission, and notation round-trips."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import pattern_bit
from srampuf.patterns import (
    NonAlternatingBlock,
    ParseError,
    RunLengthPattern,
    bit_runs,
    canonical_cycle,
    cyclic_notation,
    format_run_length,
    parse_run_length,
)

# the pattern strings used by the default floorplan
TABLE_PATTERNS = [
    "0(32)1(64)0(64)",
    "0(29)1(29)",
    "0(16)1(16)",
    "0(16)1(32)0(32)",
]


def test_parse_even_run_count_has_no_offset():
    p = parse_run_length("0(16)1(16)")
    assert p.offset_run is None
    assert p.block == ((0, 16), (1, 16))
    assert p.period == 32


def test_parse_odd_run_count_peels_offset():
    p = parse_run_length("0(32)1(64)0(64)")
    assert p.offset_run == (0, 32)
    assert p.block == ((1, 64), (0, 64))
    assert p.period == 128

    p = parse_run_length("0(16)1(32)0(32)")
    assert p.offset_run == (0, 16)
    assert p.block == ((1, 32), (0, 32))
    assert p.period == 64


def test_parse_single_run_is_constant():
    p = parse_run_length("0(8)")
    assert p.offset_run is None
    assert p.block == ((0, 8),)
    assert p.period == 8
    assert not p.bits(20).any()


@pytest.mark.parametrize(
    "text",
    ["", "0", "0()", "0(0)", "2(4)", "0(16)1(16) ", "x0(4)", "1(1)"],
)
def test_parse_rejects_malformed(text):
    with pytest.raises(ParseError):
        parse_run_length(text)


def test_parse_rejects_non_alternating_block():
    with pytest.raises(NonAlternatingBlock):
        parse_run_length("0(16)0(16)")
    with pytest.raises(NonAlternatingBlock):
        parse_run_length("0(4)1(8)1(4)0(2)")


def test_bits_prefix_and_periodicity():
    p = parse_run_length("0(32)1(64)0(64)")
    b = p.bits(32 + 128 * 3)
    assert not b[:32].any()
    assert b[32:96].all()
    assert not b[96:160].any()
    # periodic after the offset
    assert np.array_equal(b[32 : 32 + 128], b[160 : 160 + 128])
    assert p.bits(0).size == 0
    with pytest.raises(ValueError):
        p.bits(-1)


def test_signs_are_plus_minus_one():
    p = parse_run_length("0(2)1(2)")
    assert np.array_equal(p.signs(6), [-1.0, -1.0, 1.0, 1.0, -1.0, -1.0])


def test_full_cycle_and_anchored_cycle():
    p = parse_run_length("0(32)1(64)0(64)")
    full = p.full_cycle()
    assert full.size == 32 + 128
    anchored = p.anchored_cycle()
    assert anchored.size == 128
    # the anchored cycle wraps in the starting phase: 0^32 1^64 0^32
    assert bit_runs(anchored) == [(0, 32), (1, 64), (0, 32)]


@given(st.sampled_from(TABLE_PATTERNS), st.integers(min_value=0, max_value=700))
def test_bits_agree_with_literal_run_walk(text, k):
    p = parse_run_length(text)
    assert int(p.bits(k + 1)[k]) == pattern_bit(text, k)


def test_format_run_length_examples():
    assert format_run_length([0] * 16 + [1] * 16) == "0(16)1(16)"
    assert format_run_length(np.zeros(8, dtype=np.uint8)) == "0(8)"
    assert format_run_length([0] * 32 + [1] * 64 + [0] * 32) == "0(32)1(64)0(32)"
    with pytest.raises(ParseError):
        format_run_length([])


def test_cyclic_notation_merges_wrap_around_run():
    assert cyclic_notation([0] * 32 + [1] * 64 + [0] * 32) == "0(32)1(64)0(64)"
    assert cyclic_notation([0] * 16 + [1] * 16) == "0(16)1(16)"
    with pytest.raises(ParseError):
        cyclic_notation([])


@pytest.mark.parametrize("text", TABLE_PATTERNS)
def test_anchored_cycle_notation_round_trips(text):
    p = parse_run_length(text)
    assert cyclic_notation(p.anchored_cycle()) == text


def test_canonical_cycle():
    arr, flipped = canonical_cycle([1, 0, 1, 1])
    assert np.array_equal(arr, [0, 1, 0, 0]) and flipped
    arr, flipped = canonical_cycle([0, 1])
    assert np.array_equal(arr, [0, 1]) and not flipped
    with pytest.raises(ParseError):
        canonical_cycle([])


def test_bit_runs():
    assert bit_runs(np.array([0, 0, 1, 1, 1, 0])) == [(0, 2), (1, 3), (0, 1)]
    assert bit_runs(np.array([], dtype=np.uint8)) == []
    assert bit_runs(np.ones(4, dtype=np.uint8)) == [(1, 4)]


@given(st.lists(st.integers(min_value=0, max_value=1), min_size=2, max_size=200))
def test_parse_of_plain_encoding_reproduces_vector(bits):
    t = np.asarray(bits, dtype=np.uint8)
    p = parse_run_length(format_run_length(t))
    assert np.array_equal(p.bits(t.size), t)


@st.composite
def patterns(draw):
    # run-count parity encodes the offset, so only single-run or even-run
    # blocks (optionally prefixed) are expressible in the notation
    first = draw(st.integers(min_value=0, max_value=1))
    n_runs = draw(st.sampled_from([1, 2, 4, 6]))
    block = tuple(
        ((first + i) % 2, draw(st.integers(min_value=1, max_value=40)))
        for i in range(n_runs)
    )
    if n_runs == 1 and block[0][1] < 2:
        block = ((block[0][0], 2),)
    offset = None
    if n_runs > 1 and draw(st.booleans()):
        offset = (1 - first, draw(st.integers(min_value=1, max_value=40)))
    return RunLengthPattern(offset_run=offset, block=block)


@given(patterns())
def test_notation_round_trips_through_parser(p):
    assert parse_run_length(p.notation()) == p
