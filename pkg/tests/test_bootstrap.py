import math

import numpy as np
import pytest

from conespec.bootstrap import (bootstrap_infinity,
                                bootstrap_origin, enumerate_schematic_terms,
                                regularity_ladder, remainder_order)
from conespec.closed_form import ParameterError
from conespec.flat_kernel import (divergence_free_nullspace,
                                  quadratic_lie_isomorphism)


def orders(state):
    return [h["order"] for h in state.history]


def test_remainder_order_examples():
    assert remainder_order(1, 4, 0.3) == pytest.approx(4.6)
    assert remainder_order(2, 6, 0.5) == pytest.approx(7.0)
    assert remainder_order(1, 4, 0.5, regime="origin") == pytest.approx(-3.0)
    with pytest.raises(ParameterError):
        remainder_order(1, 4, 0.0)


def test_remainder_quadratic_terms_dominate():
    # every higher-j term decays at least as fast as the quadratic ones
    for k in (1, 2, 3):
        h_order = 0.7
        quad = 2 * h_order + 2 * (k + 1)
        terms = enumerate_schematic_terms(k, j_max=2 * (k + 1) + 2)
        assert terms
        for term in terms:
            assert sum(term.alphas) == 2 * (k + 1)
            assert term.order(h_order) >= quad - 1e-12


def test_remainder_monotone():
    prev = None
    for h in np.linspace(0.1, 4.0, 40):
        v = remainder_order(2, 8, float(h))
        if prev is not None:
            assert v >= prev
        prev = v


def test_infinity_path_n4_k1():
    st = bootstrap_infinity(4, 1, 0.3)
    assert st.order == 2
    assert orders(st) == [0.3, 0.6, 1.0, 1.2, 2.0, 2.0]
    mechs = [h["mechanism"] for h in st.history]
    assert "divergence-free kill (degree-1 profile)" in mechs
    assert "log-profile kill (critical dimension)" in mechs


def test_infinity_terminal_values():
    assert bootstrap_infinity(6, 1, 0.5).order == 4
    st = bootstrap_infinity(6, 2, 0.4)
    assert st.order == 2
    assert any(h["mechanism"] == "log-profile kill (critical dimension)"
               for h in st.history)
    # already past the optimal order: immediate return
    st = bootstrap_infinity(4, 1, 3.0)
    assert st.order == 2 and len(st.history) == 1


def test_infinity_barrier_inventory_n8():
    st = bootstrap_infinity(8, 1, 0.3)
    assert st.order == 6
    kinds = {b[0]: b[1] for b in st.barriers}
    assert kinds[4].startswith("divergence-free kill (constant")
    assert kinds[5].startswith("divergence-free kill (degree-1")
    assert kinds[1].startswith("nonexceptional")


def test_infinity_grid_terminal_and_step_bound():
    pairs = [(3, 1)] + [(n, k) for n in (4, 6, 8, 10)
                        for k in range(1, n // 2)]
    for (n, k) in pairs:
        terminal = n - 2 * k
        beta0 = 0.1
        while beta0 < terminal - 1e-9:
            st = bootstrap_infinity(n, k, beta0)
            assert st.order == terminal, (n, k, beta0)
            gains = sum(1 for h in st.history
                        if h["mechanism"] == "remainder gain")
            assert gains <= math.ceil(math.log2(terminal / beta0)) + \
                len(st.barriers) + 1
            beta0 = round(beta0 + 0.1, 10)


def test_origin_paths():
    st = bootstrap_origin(4, 1, 0.5)
    assert st.order == 2.0
    assert any(h["mechanism"] == "Lie pullback subtraction"
               for h in st.history)
    assert bootstrap_origin(6, 2, 0.3).order == 2.0
    st = bootstrap_origin(4, 1, 3.0)
    assert st.order == 2.0 and len(st.history) == 1  # already past target


def test_barrier_mechanisms_independently_verified():
    for (n, k) in [(4, 1), (6, 1), (6, 2), (8, 2), (3, 1)]:
        st = bootstrap_infinity(n, k, 0.3)
        for h in st.history:
            chk = h.get("check")
            if not chk:
                continue
            assert chk["op"] == "divergence_free_nullspace"
            rec = divergence_free_nullspace(chk["n"], chk["k"], chk["mode"])
            assert rec["dimension"] == 0
        st = bootstrap_origin(n, k, 0.4)
        for h in st.history:
            chk = h.get("check")
            if chk and chk["op"] == "quadratic_lie_isomorphism":
                assert quadratic_lie_isomorphism(chk["n"])["invertible"]


def test_ladder_examples():
    rec = regularity_ladder(4, 1)
    assert rec["p"] == math.inf
    assert rec["gap"] == 1.0
    rec = regularity_ladder(8, 2)
    assert rec["p"] == pytest.approx((1 - rec["eps"]) * 4)
    assert 0 < rec["gap"] <= 1
    assert len(rec["steps"]) == 7
    with pytest.raises(ParameterError):
        regularity_ladder(8, 3, eps=0.5)  # 0.5 >= 1/(2k-1) = 1/5


def test_ladder_gap_in_range_over_eps():
    for eps in (0.01, 0.05, 0.15):
        rec = regularity_ladder(8, 2, eps=eps)
        assert 0 < rec["gap"] <= 1


def test_invalid_parameters():
    with pytest.raises(ParameterError):
        bootstrap_infinity(5, 1, 0.3)
    with pytest.raises(ParameterError):
        bootstrap_infinity(4, 1, -0.1)
    with pytest.raises(ParameterError):
        bootstrap_origin(4, 1, 0.0)
