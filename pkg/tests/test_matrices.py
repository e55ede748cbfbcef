import numpy as np
import pytest

from diracmaxwell.errors import NotUnitary
from diracmaxwell.matrices import (
    EPS_ALG, Axis, Index, MatrixLabel, Orientation, Representation, anticommutator, beta,
    conjugate_by, dirac_matrix, exact_anticommutator, exact_matrix, exact_product, format_matrix,
    is_unitary, matrix_family, printed_primed_matrix, unitary_S)

GENERATORS = (Index.ALPHA1, Index.ALPHA2, Index.ALPHA3, Index.ALPHA4)


@pytest.mark.parametrize("rep", list(Representation))
@pytest.mark.parametrize("idx", list(Index))
def test_hermitian_and_involutive(rep, idx):
    m = dirac_matrix(idx, rep)
    assert np.array_equal(m, m.conj().T)
    assert np.array_equal(m @ m, np.eye(4))


@pytest.mark.parametrize("rep", list(Representation))
def test_anticommutation_exact(rep):
    zero = np.zeros((4, 4), dtype=np.int64)
    for a in GENERATORS:
        for b in GENERATORS:
            re, im = exact_anticommutator(exact_matrix(MatrixLabel(a, rep)), exact_matrix(MatrixLabel(b, rep)))
            expect = 2 * np.eye(4, dtype=np.int64) if a is b else zero
            assert np.array_equal(re, expect) and np.array_equal(im, zero), (a, b)


def test_alpha0_is_identity_in_both():
    for rep in Representation:
        assert np.array_equal(dirac_matrix(Index.ALPHA0, rep), np.eye(4))


def test_alpha2_alpha3_anticommute():
    a2, a3 = dirac_matrix("alpha2"), dirac_matrix("alpha3")
    assert np.array_equal(anticommutator(a2, a3), np.zeros((4, 4)))


def test_alpha5_is_product_and_anticommutes():
    prod = dirac_matrix(Index.ALPHA1) @ dirac_matrix(Index.ALPHA2) @ dirac_matrix(Index.ALPHA3) @ beta()
    assert np.array_equal(prod, dirac_matrix(Index.ALPHA5))
    for g in GENERATORS:
        assert np.array_equal(anticommutator(dirac_matrix(g), prod), np.zeros((4, 4)))


def test_matrices_are_read_only():
    with pytest.raises(ValueError):
        dirac_matrix(Index.ALPHA1)[0, 0] = 5


def test_printed_primed_alpha5_matches_product():
    assert np.array_equal(printed_primed_matrix(Index.ALPHA5),
                          dirac_matrix(Index.ALPHA5, Representation.PRIMED))


def test_printed_primed_alpha2_is_not_hermitian_but_working_one_is():
    p = printed_primed_matrix(Index.ALPHA2)
    assert not np.array_equal(p, p.conj().T)
    w = dirac_matrix(Index.ALPHA2, Representation.PRIMED)
    assert np.count_nonzero(p != w) == 1
    assert w[3, 2] == -1j and p[3, 2] == 1j


def test_S_unitary():
    s = unitary_S()
    assert is_unitary(s)
    assert np.max(np.abs(s @ s.conj().T - np.eye(4))) <= EPS_ALG


@pytest.mark.parametrize("idx", list(Index))
def test_conjugation_maps_primed_onto_standard(idx):
    mapped = conjugate_by(unitary_S(), dirac_matrix(idx, Representation.PRIMED))
    assert np.max(np.abs(mapped - dirac_matrix(idx))) <= EPS_ALG


def test_opposite_orientation_does_not_map():
    s = unitary_S()
    wrong = s.conj().T @ dirac_matrix(Index.ALPHA1, Representation.PRIMED) @ s
    assert np.max(np.abs(wrong - dirac_matrix(Index.ALPHA1))) > 0.5


def test_conjugate_by_rejects_non_unitary():
    with pytest.raises(NotUnitary):
        conjugate_by(2 * np.eye(4), dirac_matrix(Index.ALPHA1))


def test_conjugate_by_identity_is_noop():
    for idx in Index:
        assert np.array_equal(conjugate_by(np.eye(4), dirac_matrix(idx)), dirac_matrix(idx))


@pytest.mark.parametrize("axis", list(Axis))
@pytest.mark.parametrize("orientation", list(Orientation))
def test_family_is_permutation_with_alpha2_on_axis(axis, orientation):
    fam = matrix_family(axis, orientation)
    assert sorted(l.index.value for l in fam.triple) == ["alpha1", "alpha2", "alpha3"]
    assert fam.working_label.index is Index.ALPHA2


def test_family_triples():
    assert [l.index for l in matrix_family("y", "negative").triple] == [Index.ALPHA1, Index.ALPHA2, Index.ALPHA3]
    assert [l.index for l in matrix_family("x", "positive").triple] == [Index.ALPHA2, Index.ALPHA3, Index.ALPHA1]
    assert [l.index for l in matrix_family("z", "negative").triple] == [Index.ALPHA3, Index.ALPHA1, Index.ALPHA2]


def test_invalid_label():
    with pytest.raises(ValueError):
        MatrixLabel("alpha7")
    with pytest.raises(ValueError):
        matrix_family("w", "positive")


def test_exact_product_matches_float():
    a = exact_matrix(MatrixLabel(Index.ALPHA2))
    b = exact_matrix(MatrixLabel(Index.ALPHA3))
    re, im = exact_product(a, b)
    assert np.array_equal(re + 1j * im, dirac_matrix(Index.ALPHA2) @ dirac_matrix(Index.ALPHA3))


def test_format_matrix():
    text = format_matrix(dirac_matrix(Index.ALPHA2))
    assert text.splitlines()[0].split() == ["[", "0", "0", "0", "-i", "]"]
    assert "1/√2" in format_matrix(unitary_S())
