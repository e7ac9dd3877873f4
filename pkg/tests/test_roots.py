"""Multiple roots: multiplicity structure, Viete refinement and escalation."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from georeg import examples as E
from georeg import poly as P
from georeg import roots as R
from georeg.gn import GaussNewtonError

from helpers import perturb_poly, roots_instance


def _matched_error(found, mult_found, exact, mult_exact) -> float:
    """Max distance between roots paired by equal multiplicity and proximity."""
    assert sorted(mult_found) == sorted(mult_exact)
    worst = 0.0
    for z, l in zip(exact, mult_exact):
        cand = [w for w, m in zip(found, mult_found) if m == l]
        worst = max(worst, min(abs(w - z) for w in cand))
    return worst


def test_double_and_simple():
    p = R.expand(1.0, [1.0, -2.0], [2, 1])
    f = R.proots(p, 1e-10)
    assert f.multiplicities == (2, 1)
    assert np.allclose(f.roots, [1.0, -2.0], atol=1e-10)
    assert f.backward_error <= 1e-12


def test_triple_root_at_zero():
    f = R.proots(P.parse("x^3"), 1e-10)
    assert f.multiplicities == (3,)
    assert abs(f.roots[0]) <= 1e-12


def test_rounded_fourfold_root():
    # (x-1)^4 with coefficients rounded to 4 significant digits
    c = np.round(R.expand(1.0, [1.0], [4]).coeffs.real * 1.0001, 4)
    p = P.Polynomial(c)
    f = R.proots(p, 1e-3)
    assert f.multiplicities == (4,)
    assert abs(f.roots[0] - 1) <= 1e-3


def test_gcd_example_exact_is_simple():
    p, _ = E.gcd_pair()
    f = R.proots(p, 1e-12)
    assert f.multiplicities == (1,) * 13


def test_fivefold_root_under_noise():
    rng = np.random.default_rng(1)
    p = perturb_poly(R.expand(1.0, [0.5], [5]), rng, 1e-9)
    f = R.proots(p, 1e-8)
    assert f.multiplicities == (5,)
    assert abs(f.roots[0] - 0.5) <= 1e-8
    # the unstructured companion roots scatter at ~eps^(1/5)
    assert np.max(np.abs(R.companion_roots(p) - 0.5)) >= 1e-3


def test_structure_from_gcd_chain():
    p = R.expand(1.0, [1.0, -1.0, 2j], [3, 2, 1])
    st_ = R.multiplicity_structure(p, 1e-10)
    assert st_.multiplicities == (3, 2, 1)
    assert st_.codimension == 3
    assert st_.estimates is not None


def test_structure_validation():
    with pytest.raises(ValueError):
        R.RootStructure((2, 0))
    with pytest.raises(ValueError):
        R.RootStructure((2, 1), (1.0,))


def test_canonical_order():
    s = R.RootStructure.from_pairs([1, 2, 1], [3.0, 5.0, -1.0])
    assert s.multiplicities == (2, 1, 1)
    assert s.estimates == (5.0, -1.0, 3.0)


def test_initial_guess_layout():
    p = R.expand(2.0, [1.0, -1.0], [2, 1])
    z = R.roots_initial(p, R.multiplicity_structure(p, 1e-10))
    assert z.size == 3
    assert abs(z[0] - 2.0) <= 1e-8


def test_viete_model_zero_at_exact_factorization():
    p = R.expand(1.5, [0.3, -0.7], [2, 3])
    model = R.viete_model(p, (2, 3))
    z = np.array([1.5, 0.3, -0.7], dtype=complex)
    assert np.linalg.norm(model.residual(z)) <= 1e-14
    assert model.dim_residual == 6 and model.dim_unknowns == 3


def test_collision_guard():
    p = R.expand(1.0, [0.0], [4])
    with pytest.raises(R.RootCollisionError):
        R.roots_refine(p, R.RootStructure((2, 2)), np.array([1.0, 1e-13, -1e-13], dtype=complex))


def test_wrong_structure_shows_in_condition():
    # (2, 2) fitted to a fourfold root: the two roots drift together and the
    # sensitivity blows up compared with the right structure
    p = R.expand(1.0, [0.0], [4])
    wrong = R.roots_refine(p, R.RootStructure((2, 2)), np.array([1.0, 1e-3, -1e-3], dtype=complex))
    right = R.roots_refine(p, R.RootStructure((4,)), np.array([1.0, 1e-3], dtype=complex))
    assert wrong.min_separation < 1e-6
    assert wrong.condition > 1e4 * right.condition


def test_collision_error_is_gauss_newton_error():
    assert issubclass(R.RootCollisionError, GaussNewtonError)


def test_escalation_splits_largest():
    # a 1e-4 split of a double root: tight tolerance must separate it
    p = R.expand(1.0, [1.0, 1.0001, -2.0], [1, 1, 1])
    loose, tight = R.proots(p, 1e-3), R.proots(p, 1e-12)
    assert loose.multiplicities == (2, 1)
    assert tight.multiplicities == (1, 1, 1)
    assert tight.backward_error <= 1e-12


def test_expand_roundtrip():
    f = R.proots(R.expand(1.0, [1.0, -2.0], [2, 1]), 1e-10)
    p = f.expand()
    assert np.allclose(p.coeffs, R.expand(1.0, [1.0, -2.0], [2, 1]).coeffs, atol=1e-12)


def test_determinism():
    p = perturb_poly(R.expand(1.0, [0.5, -1.0], [3, 2]), np.random.default_rng(0), 1e-10)
    a, b = R.proots(p, 1e-8, seed=3), R.proots(p, 1e-8, seed=3)
    assert a.multiplicities == b.multiplicities
    assert np.array_equal(a.roots, b.roots)


def test_scaling_invariance():
    p = R.expand(1.0, [0.5, -1.0], [3, 1])
    a, b = R.proots(p, 1e-10), R.proots(p * 1e4, 1e-10)
    assert a.multiplicities == b.multiplicities
    assert np.allclose(a.roots, b.roots, atol=1e-10)
    assert abs(b.leading - 1e4) <= 1e-6


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_noisy_instances_recovered(seed):
    z, mult, p = roots_instance(seed)
    p = perturb_poly(p, np.random.default_rng(seed), 1e-10)
    f = R.proots(p, 1e-8)
    assert _matched_error(f.roots, f.multiplicities, z, mult) <= 1e-6
    assert f.backward_error <= 1e-8


def test_initial_estimates_simple_and_double():
    p = R.expand(1.0, [1.0, 2.0], [1, 1])
    z = R.roots_initial(p, R.RootStructure((1, 1)))
    assert np.allclose(sorted(z[1:].real), [1.0, 2.0], atol=1e-8)
    z = R.roots_initial(R.expand(1.0, [1.0], [2]), R.RootStructure((2,)))
    assert abs(z[1] - 1.0) <= 1e-8


def test_refine_from_perturbed_guess():
    p = R.expand(1.0, [1.0, -2.0], [2, 1])
    f = R.roots_refine(p, R.RootStructure((2, 1)), np.array([1.0, 0.9, -2.1], dtype=complex))
    assert np.allclose(f.roots, [1.0, -2.0], atol=1e-12)
    assert f.backward_error <= 1e-14


def test_triple_root_accuracy_matches_noise():
    rng = np.random.default_rng(2)
    p = perturb_poly(R.expand(1.0, [1.0, -1.0], [3, 1]), rng, 1e-8)
    f = R.roots_refine(p, R.RootStructure((3, 1)), np.array([1.0, 1.01, -0.99], dtype=complex))
    assert abs(f.roots[0] - 1.0) <= 1e-7  # not 1e-8 ** (1/3)


@pytest.mark.parametrize("n", [3, 5, 7])
def test_pure_power_root_is_mean(n):
    rng = np.random.default_rng(n)
    p = perturb_poly(P.parse(f"x^{n}"), rng, 1e-9)
    f = R.roots_refine(p, R.RootStructure((n,)), np.array([1.0, 0.0], dtype=complex))
    c = p.coeffs
    mean = -c[n - 1] / (n * c[n])
    assert abs(f.roots[0] - mean) <= 1e-12
    assert abs(f.roots[0] - np.mean(R.companion_roots(p))) <= 1e-10


def test_fivefold_root_spec_noise():
    p = perturb_poly(R.expand(1.0, [0.5], [5]), np.random.default_rng(9), 1e-6)
    f = R.proots(p, 1e-4)
    assert f.multiplicities == (5,)
    assert abs(f.roots[0] - 0.5) <= 1e-5


@settings(max_examples=25)
@given(st.integers(0, 10_000), st.sampled_from([1e-10, 1e-6, 1e-3]))
def test_multiplicities_sum_to_degree(seed, tol):
    _, _, p = roots_instance(seed)
    p = perturb_poly(p, np.random.default_rng(seed), 1e-7)
    f = R.proots(p, tol)
    assert sum(f.multiplicities) == p.exact_degree
    assert list(f.multiplicities) == sorted(f.multiplicities, reverse=True)
