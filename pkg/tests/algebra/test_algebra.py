"""Tests for algebra: built-in Frobenius algebras, axioms, JSON and forest evaluation."""
import json

import pytest

from ainfty import mk, tensor, identity
from algebra import (FrobeniusAlgebraSpec, TensorElement, apply_forest, apply_forest_op, builtin, from_json,
                     koszul_sign, parity_sign, to_json, verify_frobenius)
from errors import AlgebraAxiomError, ArityError, ShapeError


@pytest.fixture
def dual():
    """Z[x]/(x^2) in degree 0."""
    return builtin('dual')


# ============================================================================
# Test Group 1: Built-in algebras
# ============================================================================

class TestBuiltins:
    """Structure constants of the built-ins."""

    @pytest.mark.parametrize('name', ['dual', 'sphere2', 'sphere3'])
    def test_axioms_hold(self, name):
        """Every built-in satisfies the Frobenius axioms."""
        assert verify_frobenius(builtin(name)).passed

    def test_sphere_degrees(self):
        """x of H*(S^n) sits in degree -n."""
        assert builtin('sphere3').degrees == (0, -3)

    def test_dual_basis(self, dual):
        """The pairing swaps 1 and x."""
        assert dual.dual_basis(0) == {1: 1}
        assert dual.dual_basis(1) == {0: 1}

    def test_dual_coproduct(self, dual):
        """nu(1) = 1 (x) x + x (x) 1 and nu(x) = x (x) x."""
        assert dual.coproduct_of(0) == {(0, 1): 1, (1, 0): 1}
        assert dual.coproduct_of(1) == {(1, 1): 1}

    def test_unit_index(self, dual):
        """The unit is the first basis element."""
        assert dual.unit_index == 0

    @pytest.mark.parametrize('name', ['sphere1', 'torus', 'sphereX'])
    def test_unknown_names(self, name):
        """Unknown names and low-dimensional spheres are rejected."""
        with pytest.raises(ShapeError):
            builtin(name)


# ============================================================================
# Test Group 2: Validation and JSON
# ============================================================================

class TestValidation:
    """Axiom checks and the JSON format."""

    def test_malformed_fields(self):
        """A degree list of the wrong length is a shape error."""
        zero = ((0, 0), (0, 0))
        with pytest.raises(ShapeError):
            FrobeniusAlgebraSpec('bad', ('1', 'x'), (0,), (1, 0), (zero, zero), (0, 1), (zero, zero))

    def test_degenerate_pairing(self, dual):
        """A zero counit gives a degenerate pairing."""
        data = json.loads(to_json(dual))
        data['counit'] = [0, 0]
        data['coproduct'] = [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]
        with pytest.raises(AlgebraAxiomError) as exc_info:
            from_json(json.dumps(data))
        assert exc_info.value.axiom == 'non-degenerate pairing'

    def test_missing_field(self):
        """A JSON algebra without a basis is a shape error."""
        with pytest.raises(ShapeError):
            from_json('{"degree": [0]}')

    def test_coproduct_derived_when_omitted(self, dual):
        """Dropping the coproduct from JSON derives the same one."""
        data = json.loads(to_json(dual))
        del data['coproduct']
        assert from_json(json.dumps(data)).coproduct == dual.coproduct

    def test_json_round_trip(self, dual):
        """to_json and from_json agree."""
        assert from_json(to_json(dual)) == dual


# ============================================================================
# Test Group 3: Tensors and signs
# ============================================================================

class TestTensors:
    """TensorElement and koszul_sign."""

    def test_degree(self, dual):
        """1 (x) x has Hochschild degree 1."""
        assert TensorElement.from_names(dual, '1', 'x').degree == 1

    def test_unknown_name(self, dual):
        """Names outside the basis are rejected."""
        with pytest.raises(ShapeError):
            TensorElement.from_names(dual, 'y')

    def test_mixed_degrees_rejected(self):
        """Words of different degrees cannot be combined."""
        with pytest.raises(ShapeError):
            TensorElement(builtin('sphere2'), {(0,): 1, (1,): 1})

    def test_format(self, dual):
        """Combinations render with basis names."""
        assert str(TensorElement(dual, {(0, 1): 1, (1, 1): -1})) == '1⊗x - x⊗x'

    def test_koszul_sign(self):
        """Swapping two odd elements is odd; even elements commute freely."""
        assert koszul_sign([1, 0], [1, 1]) == -1
        assert koszul_sign([1, 0], [2, 1]) == 1
        assert koszul_sign([2, 0, 1], [1, 1, 1]) == 1

    def test_koszul_sign_needs_permutation(self):
        """A non-permutation is rejected."""
        with pytest.raises(ShapeError):
            koszul_sign([0, 0], [1, 1])

    @pytest.mark.parametrize('exponent, sign', [(0, 1), (3, -1), (-3, -1), (-6, 1)])
    def test_parity_sign(self, exponent, sign):
        """Negative exponents give ints too."""
        assert parity_sign(exponent) == sign
        assert isinstance(parity_sign(exponent), int)


# ============================================================================
# Test Group 4: Forest evaluation
# ============================================================================

class TestForestEvaluation:
    """apply_forest and apply_forest_op."""

    def test_corolla_multiplies(self, dual):
        """m_2 evaluates to the product."""
        assert apply_forest(dual, mk(2), {(0, 1): 1}) == {(1,): 1}
        assert apply_forest(dual, mk(2), {(1, 1): 1}) == {}

    def test_higher_corolla_vanishes(self, dual):
        """Strict algebras have no m_3."""
        assert apply_forest(dual, mk(3), {(0, 0, 0): 1}) == {}

    def test_tensor_with_strand(self, dual):
        """m_2 next to a strand multiplies the first two letters."""
        forest = tensor(mk(2), identity(1))
        assert apply_forest(dual, forest, {(0, 1, 1): 1}) == {(1, 1): 1}

    def test_arity_mismatch(self, dual):
        """Words must have one letter per input."""
        with pytest.raises(ArityError):
            apply_forest(dual, mk(2), {(0, 1, 1): 1})

    def test_coproduct_evaluation(self, dual):
        """m_2 run backwards is the coproduct."""
        assert apply_forest_op(dual, mk(2), {(1,): 1}) == {(1, 1): 1}
        assert apply_forest_op(dual, mk(2), {(0,): 1}) == {(0, 1): 1, (1, 0): 1}

    def test_odd_algebras_rejected_backwards(self):
        """Backwards evaluation needs an evenly graded algebra."""
        with pytest.raises(ShapeError):
            apply_forest_op(builtin('sphere3'), mk(2), {(1,): 1})
