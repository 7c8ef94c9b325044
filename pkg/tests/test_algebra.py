import numpy as np
import pytest

from petzgap.algebra import (SubalgebraSpec, conditional_expectation,
                             factor_spec, full_spec, partial_trace_view,
                             pinching_spec, trivial_spec, validate_expectation)
from petzgap.errors import InvalidInput, SpecInconsistent
from petzgap.linalg import hs_inner
from petzgap.states import SamplerConfig, make_density, sample

from conftest import ginibre


def random_matrix(dim, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def test_full_algebra_expectation_is_identity():
    x = random_matrix(3, 0)
    np.testing.assert_allclose(conditional_expectation(full_spec(3), x), x,
                               atol=1e-12)


def test_diagonal_pinching():
    x = random_matrix(4, 1)
    spec = pinching_spec(4, [1, 1, 1, 1])
    np.testing.assert_allclose(conditional_expectation(spec, x),
                               np.diag(np.diag(x)), atol=1e-12)


def test_block_pinching_keeps_blocks():
    x = random_matrix(4, 2)
    spec = pinching_spec(4, [2, 2])
    out = conditional_expectation(spec, x)
    np.testing.assert_allclose(out[:2, :2], x[:2, :2], atol=1e-12)
    np.testing.assert_allclose(out[2:, 2:], x[2:, 2:], atol=1e-12)
    assert np.abs(out[:2, 2:]).max() <= 1e-14


def test_trivial_algebra_gives_normalized_trace():
    x = random_matrix(3, 3)
    out = conditional_expectation(trivial_spec(3), x)
    np.testing.assert_allclose(out, np.trace(x) / 3 * np.eye(3), atol=1e-12)


def test_factor_expectation_on_product():
    # algebra 1 (x) M_2 inside M_4: E(rho1 (x) rho2) = (1/2) 1 (x) rho2
    rho1 = ginibre(2, 2, 4).matrix
    rho2 = ginibre(2, 2, 5).matrix
    spec = factor_spec(2, 2)
    out = conditional_expectation(spec, np.kron(rho1, rho2))
    np.testing.assert_allclose(out, np.kron(np.eye(2) / 2, rho2), atol=1e-12)


def test_factor_spec_on_prime_left_factor_is_full():
    spec = factor_spec(1, 3)
    x = random_matrix(3, 6)
    np.testing.assert_allclose(conditional_expectation(spec, x), x, atol=1e-12)


def test_expectation_dim_mismatch():
    with pytest.raises(InvalidInput):
        conditional_expectation(full_spec(3), np.eye(4))


def test_partial_trace_of_kron():
    # single block (n, m): the view traces out the multiplicity factor
    a = random_matrix(2, 7)
    b = random_matrix(3, 8)
    spec = SubalgebraSpec(dim=6, blocks=[(2, 3)], basis=None)
    np.testing.assert_allclose(partial_trace_view(spec, np.kron(a, b)),
                               np.trace(b) * a, atol=1e-12)


def test_partial_trace_of_identity():
    spec = SubalgebraSpec(dim=4, blocks=[(2, 2)], basis=None)
    np.testing.assert_allclose(partial_trace_view(spec, np.eye(4) / 4),
                               np.eye(2) / 2, atol=1e-12)


def test_partial_trace_matches_index_sum():
    x = random_matrix(4, 9)
    spec = SubalgebraSpec(dim=4, blocks=[(2, 2)], basis=None)
    view = partial_trace_view(spec, x)
    manual = x.reshape(2, 2, 2, 2)
    manual = manual[:, 0, :, 0] + manual[:, 1, :, 1]
    np.testing.assert_allclose(view, manual, atol=1e-12)


def test_partial_trace_requires_single_block():
    with pytest.raises(InvalidInput):
        partial_trace_view(pinching_spec(4, [2, 2]), np.eye(4))


def test_partial_trace_consistent_with_expectation():
    x = random_matrix(6, 10)
    spec = factor_spec(3, 2)
    view = partial_trace_view(spec, x)
    rebuilt = spec.basis @ np.kron(view / 3, np.eye(3)) @ spec.basis.conj().T
    np.testing.assert_allclose(conditional_expectation(spec, x), rebuilt,
                               atol=1e-12)


@pytest.mark.parametrize("spec_builder", [
    lambda: trivial_spec(4),
    lambda: full_spec(4),
    lambda: pinching_spec(4, [2, 2]),
    lambda: pinching_spec(5, [3, 1, 1]),
    lambda: factor_spec(2, 2),
    lambda: factor_spec(2, 3),
])
def test_validate_expectation_passes(spec_builder):
    validate_expectation(spec_builder())


def test_spec_rejects_bad_block_fill():
    with pytest.raises(SpecInconsistent):
        SubalgebraSpec(dim=4, blocks=[(2, 1)], basis=None)


def test_spec_rejects_non_unitary_basis():
    with pytest.raises(SpecInconsistent):
        SubalgebraSpec(dim=2, blocks=[(2, 1)], basis=np.array([[1.0, 1.0],
                                                               [0.0, 1.0]]))


def test_expectation_is_hs_contraction_and_projection():
    spec = factor_spec(2, 3)
    rng = np.random.default_rng(11)
    for _ in range(5):
        x = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        ex = conditional_expectation(spec, x)
        assert np.linalg.norm(ex) <= np.linalg.norm(x) + 1e-12
        np.testing.assert_allclose(conditional_expectation(spec, ex), ex,
                                   atol=1e-10)


def test_expectation_self_adjoint_trace_preserving():
    spec = pinching_spec(4, [3, 1])
    x = random_matrix(4, 12)
    y = random_matrix(4, 13)
    lhs = hs_inner(conditional_expectation(spec, x), y)
    rhs = hs_inner(x, conditional_expectation(spec, y))
    assert lhs == pytest.approx(rhs, abs=1e-10)
    assert np.trace(conditional_expectation(spec, x)) == pytest.approx(
        np.trace(x), abs=1e-10)


def test_expectation_spectrum_containment():
    rho = ginibre(6, 6, 14)
    out = make_density(conditional_expectation(factor_spec(3, 2), rho.matrix))
    lo, hi = rho.eigenvalues.min(), rho.eigenvalues.max()
    assert out.eigenvalues.min() >= lo - 1e-12
    assert out.eigenvalues.max() <= hi + 1e-12


def test_spec_json_roundtrip():
    for spec in (factor_spec(2, 3), pinching_spec(4, [2, 2]), trivial_spec(3)):
        blob = spec.to_json()
        back = SubalgebraSpec.from_json(blob)
        assert back.dim == spec.dim
        assert back.blocks == spec.blocks
        x = random_matrix(spec.dim, 15)
        np.testing.assert_allclose(conditional_expectation(back, x),
                                   conditional_expectation(spec, x),
                                   atol=1e-12)
