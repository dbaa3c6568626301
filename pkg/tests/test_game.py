from fractions import Fraction

import pytest

from exlab.game import (
    CapExceeded,
    GameInstance,
    InputPair,
    all_strings,
    all_subsets,
    canonical_subset,
    complement_bits,
    enumerate_inputs,
    is_win,
    restrict,
    subset_mask,
)


class TestGameInstance:
    def test_valid(self):
        g = GameInstance(4, 2, Fraction(1, 25))
        assert g.num_inputs == 96
        assert g.gamma == Fraction(1, 25)

    @pytest.mark.parametrize("n,m,gamma", [(3, 0, 0), (3, 4, 0), (3, 1, 1), (3, 1, Fraction(-1, 2))])
    def test_invalid(self, n, m, gamma):
        with pytest.raises(ValueError):
            GameInstance(n, m, gamma)

    def test_frozen(self):
        with pytest.raises(AttributeError):
            GameInstance(2, 1).n = 3


class TestRestrict:
    def test_leftmost_is_qubit_one(self):
        assert restrict("1010", (1, 3)) == "11"
        assert restrict("1010", (2, 4)) == "00"

    def test_full(self):
        assert restrict("0110", (1, 2, 3, 4)) == "0110"

    def test_constant(self):
        for y in all_subsets(5, 3):
            assert restrict("00000", y) == "000"

    @pytest.mark.parametrize("y", [(1, 1), (0, 2), (2, 5)])
    def test_bad_subsets(self, y):
        with pytest.raises(ValueError):
            restrict("1010", y)

    def test_order_of_y_ignored(self):
        assert restrict("1010", (3, 1)) == "11"

    def test_canonical_sorts(self):
        assert canonical_subset([3, 1], 4) == (1, 3)
        with pytest.raises(ValueError):
            InputPair("101", (1, 1))

    def test_not_bits(self):
        with pytest.raises(ValueError):
            restrict("10a0", (1, 2))


class TestIsWin:
    def test_examples(self):
        assert not is_win("1010", (1, 3), "11")
        assert is_win("1010", (1, 3), "00")

    def test_complement_wins(self):
        for x in all_strings(4):
            for y in all_subsets(4, 2):
                assert is_win(x, y, complement_bits(restrict(x, y)))

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            is_win("1010", (1, 3), "1")


class TestEnumerate:
    def test_smallest(self):
        assert [(p.x, p.y) for p in enumerate_inputs(1, 1)] == [("0", (1,)), ("1", (1,))]

    @pytest.mark.parametrize("n,m,count", [(2, 1, 8), (4, 2, 96)])
    def test_counts(self, n, m, count):
        assert sum(1 for _ in enumerate_inputs(n, m)) == count

    def test_order(self):
        pairs = [(p.x, p.y) for p in enumerate_inputs(2, 1)]
        assert pairs[:3] == [("00", (1,)), ("00", (2,)), ("01", (1,))]

    def test_cap(self, monkeypatch):
        with pytest.raises(CapExceeded, match="sampled"):
            next(enumerate_inputs(13, 1))
        monkeypatch.setenv("EXLAB_MAX_QUBITS", "3")
        with pytest.raises(CapExceeded):
            next(enumerate_inputs(4, 1))

    def test_mask(self):
        assert subset_mask((1, 3), 4) == 0b1010
