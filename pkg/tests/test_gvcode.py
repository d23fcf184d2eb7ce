import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtscheme import gvcode
from gtscheme.field import PrimeField
from gtscheme.gvcode import (
    BudgetExceeded,
    Construction,
    GeneratorMatrix,
    all_messages,
    derandomized_construct,
    dif,
    dif_exact,
    encode,
    goal,
    message,
    message_index,
    modular_gray_code,
    random_code,
    reed_solomon,
    row_values,
    verify_distance,
)
from gtscheme.params import CodeParams, binom_tail_lt_exact, entropy_q, minimal_length

RS_CODEWORDS = ["000", "111", "222", "012", "120", "201", "021", "102", "210"]


def naive_weights(entries, q):
    """Weights of G y for every y, by direct re-encoding in index order."""
    m, k = entries.shape
    out = []
    for idx in range(q**k):
        y = [(idx // q**t) % q for t in range(k)]
        word = [sum(int(entries[i, t]) * y[t] for t in range(k)) % q for i in range(m)]
        out.append(sum(1 for v in word if v))
    return out


def naive_min_distance(entries, q):
    return min(naive_weights(entries, q)[1:])


@st.composite
def small_matrices(draw, max_size=400):
    q = draw(st.sampled_from([2, 3, 5, 7]))
    k = draw(st.integers(1, 4))
    while q**k > max_size:
        k -= 1
    m = draw(st.integers(k, 9))
    entries = draw(st.lists(st.lists(st.integers(0, q - 1), min_size=k, max_size=k), min_size=m, max_size=m))
    return GeneratorMatrix(np.array(entries), CodeParams(q=q, m=m, k=k, delta=0))


# ---- messages and encoding -------------------------------------------------

def test_message_order_and_blocks():
    q, k = 3, 3
    msgs = all_messages(q, k)
    for idx in range(q**k):
        assert list(msgs[idx]) == list(message(idx, q, k))
        assert message_index(msgs[idx], q) == idx
    for j in range(k):
        for idx in range(q**j, q ** (j + 1)):
            y = msgs[idx]
            assert y[j] != 0 and not y[j + 1 :].any()


def test_reed_solomon_codewords_in_reference_order():
    g = reed_solomon(3, 2)
    assert g.entries.tolist() == [[1, 0], [1, 1], [1, 2]]
    words = ["".join(map(str, encode(g, message(i, 3, 2)))) for i in range(9)]
    assert words == RS_CODEWORDS


def test_encode_examples():
    g = reed_solomon(3, 2)
    assert encode(g, [0, 0]).tolist() == [0, 0, 0]
    assert encode(g, [0, 1]).tolist() == [0, 1, 2]
    F = PrimeField(3)
    assert encode(g, [F(0), F(1)]).tolist() == [0, 1, 2]
    with pytest.raises(ValueError):
        encode(g, [1, 2, 0])
    with pytest.raises(ValueError):
        encode(g, [PrimeField(5)(1), PrimeField(5)(0)])


@given(small_matrices(), st.data())
def test_encode_is_linear(g, data):
    q, k = g.params.q, g.params.k
    y1 = data.draw(st.lists(st.integers(0, q - 1), min_size=k, max_size=k))
    y2 = data.draw(st.lists(st.integers(0, q - 1), min_size=k, max_size=k))
    s = [(a + b) % q for a, b in zip(y1, y2)]
    assert encode(g, s).tolist() == ((encode(g, y1) + encode(g, y2)) % q).tolist()


@given(small_matrices())
def test_row_values_match_direct_products(g):
    q = g.params.q
    msgs = all_messages(q, g.params.k)
    for i in range(g.params.m):
        assert row_values(g.entries[i], q).tolist() == ((msgs @ g.entries[i]) % q).tolist()


def test_generator_matrix_validation():
    p = CodeParams(q=3, m=3, k=2, delta=0)
    with pytest.raises(ValueError):
        GeneratorMatrix(np.zeros((2, 2)), p)
    with pytest.raises(ValueError):
        GeneratorMatrix(np.full((3, 2), 3), p)
    g = GeneratorMatrix(np.zeros((3, 2)), p)
    assert not g.entries.flags.writeable
    assert g.element(0, 0) == PrimeField(3)(0)


# ---- Gray code and distance -----------------------------------------------

@pytest.mark.parametrize("q,k", [(2, 1), (2, 5), (3, 3), (5, 2), (7, 2)])
def test_modular_gray_code_visits_everything_once(q, k):
    y = [0] * k
    seen = {tuple(y)}
    for t in modular_gray_code(q, k):
        y[t] = (y[t] + 1) % q
        seen.add(tuple(y))
    assert len(seen) == q**k


def test_verify_distance_examples():
    assert verify_distance(reed_solomon(3, 2)) == 2
    p = CodeParams(q=5, m=4, k=3, delta=0)
    entries = np.array([[1, 0, 2], [3, 0, 1], [4, 0, 4], [2, 0, 1]])
    assert verify_distance(GeneratorMatrix(entries, p)) == 0


@settings(max_examples=80, deadline=None)
@given(small_matrices(max_size=2500))
def test_verify_distance_matches_naive(g):
    assert verify_distance(g) == naive_min_distance(g.entries, g.params.q)


def test_verify_distance_gray_path_matches_naive():
    # q^k above the low-table size, so the Gray-code walk is exercised
    rng = np.random.default_rng(7)
    p = CodeParams(q=2, m=16, k=14, delta=0)
    g = GeneratorMatrix(rng.integers(0, 2, size=(16, 14)), p)
    msgs = all_messages(2, 14)
    weights = np.count_nonzero((msgs @ g.entries.T) % 2, axis=1)
    assert verify_distance(g) == int(weights[1:].min())
    p = CodeParams(q=3, m=11, k=9, delta=Fraction(1, 3))
    g = GeneratorMatrix(rng.integers(0, 3, size=(11, 9)), p)
    msgs = all_messages(3, 9)
    weights = np.count_nonzero((msgs @ g.entries.T) % 3, axis=1)
    assert verify_distance(g) == int(weights[1:].min())
    assert goal(g) == int(np.count_nonzero(weights[1:] < p.threshold))


def test_verify_distance_budget():
    g = random_code(CodeParams(q=5, m=20, k=6, delta=0), seed=1)
    with pytest.raises(BudgetExceeded):
        verify_distance(g, budget=5**6 - 1)
    with pytest.raises(BudgetExceeded):
        goal(g, budget=100)


# ---- goal and the randomized baseline --------------------------------------

def test_goal_examples():
    g = GeneratorMatrix(np.array([[1], [0], [0], [0]]), CodeParams(q=2, m=4, k=1, delta=Fraction(1, 2)))
    assert goal(g) == 1
    g = GeneratorMatrix(np.zeros((5, 2)), CodeParams(q=3, m=5, k=2, delta=0))
    assert goal(g) == 0
    assert goal(reed_solomon(3, 2, delta=Fraction(2, 3))) == 0


@settings(max_examples=40, deadline=None)
@given(small_matrices(), st.integers(0, 9))
def test_goal_matches_naive(g, num):
    q, m = g.params.q, g.params.m
    delta = min(Fraction(num, 9), 1 - Fraction(1, q))
    g = GeneratorMatrix(g.entries, CodeParams(q=q, m=m, k=g.params.k, delta=delta))
    weights = naive_weights(g.entries, q)[1:]
    assert goal(g) == sum(1 for w in weights if w < delta * m)


def test_random_code_is_seeded():
    p = CodeParams(q=7, m=10, k=3, delta=Fraction(1, 2))
    assert random_code(p, 5) == random_code(p, 5)
    assert random_code(p, 5) != random_code(p, 6)


def test_random_code_failure_rate_below_expectation_bound():
    p = CodeParams(q=2, m=8, k=1, delta=Fraction(1, 4))
    bound = 2 ** (1 - 8 * (1 - entropy_q(2, Fraction(1, 4))))  # ~0.702
    failures = sum(verify_distance(random_code(p, seed)) < 2 for seed in range(1000))
    assert failures / 1000 < bound
    # a single random column fails with probability Pr(B(8, 1/2) < 2) = 9/256
    assert abs(failures / 1000 - 9 / 256) < 0.03


def test_random_code_with_zero_delta_always_good():
    p = CodeParams(q=3, m=4, k=2, delta=0)
    assert all(goal(random_code(p, s)) == 0 for s in range(20))


# ---- Dif -------------------------------------------------------------------

def test_dif_examples():
    p = CodeParams(q=2, m=4, k=1, delta=Fraction(1, 2))  # threshold 2
    # row 3 of 4 filled, one free row after it, one nonzero so far: one more needed
    assert dif(3, 1, p) == pytest.approx(0.5, rel=1e-12)
    assert dif_exact(3, 1, p) == Fraction(1, 2)
    # already at the threshold: can no longer be bad
    assert dif(2, 2, p) == 0.0
    # needs more nonzeros than rows remain even counting this one
    assert dif(3, -1, p) == 0.0 and dif_exact(3, -1, p) == 0
    assert dif(4, 0, p) == 0.0


def _exact_dif(i, c, params):
    # Pr(bad | row i vanishes) - Pr(bad | row i nonzero), straight from tails
    p = 1 - Fraction(1, params.q)
    rest = params.m - i
    t = params.delta * params.m
    return binom_tail_lt_exact(rest, p, t - c) - binom_tail_lt_exact(rest, p, t - c - 1)


@pytest.mark.parametrize("q", [2, 3, 5])
@pytest.mark.parametrize("delta", [Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)])
def test_dif_equals_tail_difference_small(q, delta):
    if delta > 1 - Fraction(1, q):
        return
    params = CodeParams(q=q, m=20, k=1, delta=delta)
    for i in range(1, 21):
        for c in range(0, i):
            want = _exact_dif(i, c, params)
            assert dif_exact(i, c, params) == want
            got = dif(i, c, params)
            assert (got == 0) if want == 0 else abs(got - want) <= 1e-9 * want


# ---- construction ----------------------------------------------------------

def test_construct_q2_k1():
    p = CodeParams(q=2, m=8, k=1, delta=Fraction(1, 4))
    assert any(sum(col) >= 2 for col in itertools.product([0, 1], repeat=8))
    for mode in ("fast", "exact"):
        g = derandomized_construct(p, mode)
        assert int(g.entries[:, 0].sum()) >= 2
        assert g.verified is True


def test_construct_zero_delta():
    p = CodeParams(q=3, m=4, k=3, delta=0)
    g = derandomized_construct(p, "exact")
    assert goal(g) == 0


def test_construct_derived_n9_r2_instance():
    p = CodeParams(q=5, m=15, k=2, delta=Fraction(1, 2))
    for mode in ("fast", "exact"):
        g = derandomized_construct(p, mode)
        weights = naive_weights(g.entries, 5)
        assert min(weights[1:]) >= 8
        assert len(weights) == 25


def test_construct_rejects_params_below_gv():
    with pytest.raises(ValueError):
        derandomized_construct(CodeParams(q=5, m=14, k=2, delta=Fraction(1, 2)))


def test_construct_is_deterministic():
    p = CodeParams(q=7, m=minimal_length(7, 3, Fraction(2, 3)), k=3, delta=Fraction(2, 3))
    for mode in ("fast", "exact"):
        a = derandomized_construct(p, mode)
        b = derandomized_construct(p, mode)
        assert a.entries.tobytes() == b.entries.tobytes()


def test_construct_unverified_above_budget():
    p = CodeParams(q=5, m=minimal_length(5, 3, Fraction(1, 2)), k=3, delta=Fraction(1, 2))
    g = derandomized_construct(p, budget=100)
    assert g.verified is None
    assert verify_distance(g) >= p.threshold


def test_fast_failure_falls_back_to_exact(monkeypatch):
    p = CodeParams(q=5, m=15, k=2, delta=Fraction(1, 2))
    real = gvcode.verify_distance
    calls = []

    def flaky(g, budget=gvcode.DEFAULT_BUDGET):
        calls.append(g)
        return 0 if len(calls) == 1 else real(g, budget)

    monkeypatch.setattr(gvcode, "verify_distance", flaky)
    g = derandomized_construct(p, "fast")
    assert len(calls) == 2 and g.verified is True


def gv_instances(max_size):
    for q in (2, 3, 5, 7):
        for delta in (Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3)):
            if delta >= 1 - Fraction(1, q):
                continue
            for k in range(1, 8):
                if q**k > max_size:
                    break
                yield CodeParams(q=q, m=minimal_length(q, k, delta), k=k, delta=delta)


@pytest.mark.parametrize("params", list(gv_instances(300)), ids=str)
def test_construction_state_invariants(params):
    """vanish counts, partial row sums, and expected-goal bookkeeping, step by step."""
    q, m, k = params.q, params.m, params.k
    msgs = all_messages(q, k)
    state = Construction(params, "exact")
    start = state.expected_goal()
    p_bad = binom_tail_lt_exact(m, 1 - Fraction(1, q), params.delta * m)
    assert start == (q**k - 1) * p_bad
    assert start < 1
    prev = start
    rng = np.random.default_rng(0)
    while not state.done:
        i, j = state.step
        # partial row sums over fixed columns, for all messages below block j
        fixed = np.where(state.entries[i, :j] >= 0, state.entries[i, :j], 0)
        direct = (msgs[: q**j, :j] @ fixed) % q if j else np.zeros(1, dtype=np.int64)
        assert state.row_vals[: q**j].tolist() == direct.tolist()
        state.advance()
        # from-scratch recount of vanishing determined rows
        det = state.determined_rows()
        sample = rng.choice(np.arange(1, q**k), size=min(50, q**k - 1), replace=False)
        filled = np.where(state.entries >= 0, state.entries, 0)
        for idx in sample:
            y = msgs[idx]
            rows = filled[: det[idx]]
            assert state.vanish[idx] == int(np.count_nonzero((rows @ y) % q == 0))
        cur = state.expected_goal()
        assert cur <= prev
        prev = cur
    g = state.matrix()
    assert prev == goal(g) == 0


@pytest.mark.parametrize("params", list(gv_instances(4096)), ids=str)
def test_fast_and_exact_pick_the_same_letters(params):
    state = Construction(params, "exact")
    while not state.done:
        exact = state.weights("exact")
        fast = state.weights("fast")
        best = max(exact)
        ranked = sorted(exact, reverse=True)
        scale = max(abs(w) for w in exact) or 1
        gap = (ranked[0] - ranked[1]) / scale
        if gap >= Fraction(1, 10**12):
            assert int(np.argmax(fast)) == exact.index(best)
        state.advance()


def test_weights_choose_minimum_conditional_expectation():
    # brute force: for each candidate letter, the exact expected goal after fixing it
    params = CodeParams(q=3, m=minimal_length(3, 2, Fraction(1, 2)), k=2, delta=Fraction(1, 2))
    state = Construction(params, "exact")
    for _ in range(7):
        state.advance()
    w = state.weights("exact")
    after = [_expected_after(state, v) for v in range(3)]
    base = state.expected_goal()
    for v in range(3):
        # E(goal | letter v) = constant - W[v]
        assert after[v] + w[v] == after[0] + w[0]
    assert min(range(3), key=lambda v: (after[v], v)) == w.index(max(w))
    assert sum(after) / 3 == base


def _expected_after(state, letter):
    clone = Construction(state.params, "exact")
    clone.entries = state.entries.copy()
    clone.vanish = state.vanish.copy()
    clone.row_vals = state.row_vals.copy()
    clone.row, clone.col = state.row, state.col
    clone._weights = lambda mode: [1 if v == letter else 0 for v in range(state.params.q)]
    clone.advance()
    return clone.expected_goal()
