from itertools import combinations

import pytest

from thftcalc.core.exceptions import ConfigError
from thftcalc.schemas.kernel import SplitKind
from thftcalc.services.exterior_service import (
    anomaly_s_term_form,
    assemble_edge_case,
    edge_form,
    form_sign,
    prove_vanishing,
    s_term_form,
    structural_s_term,
    term_bidegree_counts,
)
from thftcalc.utils.forms import bidegree

from tests.conftest import sig_of

SMALL_SIGNATURES = [(m, n) for m in range(5) for n in range(5) if 1 <= m + n <= 4]


def in_window(sig, S):
    return sig.m <= len(S) <= sig.k - sig.n


@pytest.mark.parametrize("m,n", [(m, n) for m, n in SMALL_SIGNATURES if m + n >= 2])
def test_edge_case_assembly_is_zero(m, n):
    assert assemble_edge_case(sig_of(m, n, m + n)).is_zero


@pytest.mark.parametrize("m,n,k", [(1, 1, 3), (2, 1, 2), (1, 0, 1)])
def test_edge_case_rejects_other_signatures(m, n, k):
    with pytest.raises(ConfigError):
        assemble_edge_case(sig_of(m, n, k))


@pytest.mark.parametrize("m,n", SMALL_SIGNATURES)
def test_prove_vanishing_every_k_up_to_m_plus_n(m, n):
    for k in range(1, m + n + 1):
        mode, checked = prove_vanishing(sig_of(m, n, k))
        if k == 1 and m + n == 1:
            assert mode == "tadpole"
        elif k == m + n:
            assert mode == "edge_case"
        else:
            assert mode == "degree"
            assert checked == 2**k


def test_prove_vanishing_refuses_evaluation_range():
    with pytest.raises(ConfigError):
        prove_vanishing(sig_of(1, 0, 2))


@pytest.mark.parametrize("m,n,k", [(1, 1, 3), (1, 1, 4), (0, 1, 2), (0, 2, 3), (1, 2, 4), (2, 1, 4)])
def test_s_terms_outside_window_vanish(m, n, k):
    sig = sig_of(m, n, k)
    for size in range(k + 1):
        for S in combinations(range(1, k + 1), size):
            form = s_term_form(sig, S, generic=True)
            if not in_window(sig, S):
                assert form.is_zero, S
            elif structural_s_term(sig, S):
                assert not form.is_zero, S


@pytest.mark.parametrize("m,n,k", [(1, 1, 3), (1, 1, 4), (0, 1, 2), (0, 2, 3), (1, 0, 3), (2, 1, 4)])
def test_anomaly_s_terms_outside_window_vanish(m, n, k):
    sig = sig_of(m, n, k)
    for size in range(k):
        for S in combinations(range(1, k), size):
            form = anomaly_s_term_form(sig, S, generic=True)
            if not m <= len(S) <= k - n - 1:
                assert form.is_zero, S
            elif structural_s_term(sig, S, anomaly=True):
                assert not form.is_zero, S


def test_anomaly_s_term_excludes_distinguished_edge():
    with pytest.raises(ConfigError):
        anomaly_s_term_form(sig_of(1, 1, 3), [3])


@pytest.mark.parametrize("m,n,k", [(1, 1, 3), (2, 1, 4), (0, 2, 3)])
def test_unreduced_bidegree_matches_counts(m, n, k):
    sig = sig_of(m, n, k)
    for size in range(k + 1):
        for S in combinations(range(1, k + 1), size):
            if not structural_s_term(sig, S):
                continue
            form = s_term_form(sig, S, generic=True, reduced=False)
            counts = term_bidegree_counts(sig, S)
            for monomial in form.terms:
                deg = bidegree(monomial)
                assert deg.de_rham == counts["de_rham"]
                assert deg.dolbeault == counts["dolbeault"]


def test_missing_split_gives_zero_form():
    assert edge_form(sig_of(0, 1, 2), 1, SplitKind.E_D).is_zero
    assert edge_form(sig_of(1, 0, 2), 1, SplitKind.E_DBAR).is_zero


def test_edge_form_rejects_unknown_edge():
    with pytest.raises(ConfigError):
        edge_form(sig_of(1, 1, 3), 4, SplitKind.E_D)


def test_form_sign_topological_pair():
    sig = sig_of(1, 0, 2)
    assignments = ((SplitKind.E_D, 1), (SplitKind.E_D, 1))
    assert form_sign(sig, assignments) == 1


def test_form_sign_missing_split_is_zero():
    sig = sig_of(1, 0, 2)
    assignments = ((SplitKind.E_D, 1), (SplitKind.E_DBAR, 1))
    assert form_sign(sig, assignments) == 0


def test_form_sign_needs_every_edge():
    with pytest.raises(ConfigError):
        form_sign(sig_of(1, 0, 3), ((SplitKind.E_D, 1),))
