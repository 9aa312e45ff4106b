"""Tests for tqft_action: state sums of Sullivan diagrams on Hochschild chains.

On the dual numbers Z[x]/(x^2) the classes of t_g(x) and mu_g(x, ..., x)
are 1 (x) x (x) ... (x) x of length 2g + 2, which have infinite order in
the reduced complex.
"""
import pytest

from algebra import builtin
from errors import ArityError
from graph_core import l_graph
from sullivan import from_bw, from_classical, mu_graph, t_graph
from tqft_action import (LabeledDiagram, chain_map_report, class_record, evaluate, evaluate_combination,
                         homology_action_report, mu_action_report, state_sum)

X = {1: 1}
ONE = {0: 1}


@pytest.fixture
def dual():
    """Z[x]/(x^2) in degree 0."""
    return builtin('dual')


# ============================================================================
# Test Group 1: Labelled diagrams
# ============================================================================

class TestLabeledDiagram:
    """Input validation."""

    def test_missing_input(self):
        """Every labelled leaf needs an input."""
        with pytest.raises(ArityError):
            LabeledDiagram(l_graph(2), {1: X})

    def test_extra_input(self):
        """Inputs for labels that do not occur are rejected."""
        with pytest.raises(ArityError):
            LabeledDiagram(t_graph(1), {1: X, 2: X})

    def test_matching_inputs(self):
        """Matching labels are accepted."""
        labeled = LabeledDiagram(mu_graph(1), {1: X, 2: X})
        assert set(labeled.inputs) == {1, 2}


# ============================================================================
# Test Group 2: Evaluation
# ============================================================================

class TestEvaluation:
    """state_sum, evaluate and evaluate_combination."""

    def test_white_corolla_passes_inputs(self, dual):
        """l_3 outputs its inputs in spoke order."""
        chain = evaluate(LabeledDiagram(l_graph(3), {1: ONE, 2: X, 3: X}), dual)
        assert chain == {(0, 1, 1): 1}

    def test_linear_in_inputs(self, dual):
        """Sums of inputs give sums of outputs."""
        chain = evaluate(LabeledDiagram(l_graph(2), {1: {0: 1, 1: 2}, 2: X}), dual)
        assert chain == {(0, 1): 1, (1, 1): 2}

    @pytest.mark.parametrize('g', [1, 2])
    def test_t_g_on_x(self, dual, g):
        """t_g(x) is 1 (x) x^(2g+1)."""
        chain = evaluate(LabeledDiagram(t_graph(g), {1: X}), dual, reduced=True)
        assert chain == {(0,) + (1,) * (2 * g + 1): 1}

    @pytest.mark.parametrize('g', [1, 2])
    def test_mu_g_on_x(self, dual, g):
        """mu_g(x, ..., x) is 1 (x) x^(2g+1)."""
        inputs = {label: X for label in range(1, g + 2)}
        chain = evaluate(LabeledDiagram(mu_graph(g), inputs), dual, reduced=True)
        assert chain == {(0,) + (1,) * (2 * g + 1): 1}

    def test_combination_is_linear(self, dual):
        """Scaling the combination scales the chain."""
        combo = {diagram: 3 * sign for diagram, sign in from_bw(t_graph(1)).items()}
        assert evaluate_combination(dual, combo, {1: X}, reduced=True) == {(0, 1, 1, 1): 3}

    def test_state_sum_needs_one_circle(self, dual):
        """Diagrams with two circles have no single output word."""
        diagram = next(iter(from_classical([['E'], ['E']], {'E': [(0, 0), (1, 0)]})))
        with pytest.raises(ArityError):
            state_sum(dual, diagram, {})

    def test_state_sum_checks_labels(self, dual):
        """Inputs must match the leaves of the normal form."""
        diagram = next(iter(from_bw(t_graph(1))))
        with pytest.raises(ArityError):
            state_sum(dual, diagram, {2: X})


# ============================================================================
# Test Group 3: Classes and reports
# ============================================================================

class TestReports:
    """class_record and the verification reports."""

    def test_class_of_t_1(self, dual):
        """t_1(x) is a cycle of infinite order."""
        record = class_record(dual, {(0, 1, 1, 1): 1})
        assert record['cycle']
        assert record['degree'] == 3
        assert record['order'] == 0
        assert record['nonzero_Z'] and record['nonzero_Q']

    def test_torsion_class(self, dual):
        """x (x) x is nonzero over Z only."""
        record = class_record(dual, {(1, 1): 1})
        assert record['order'] == 2
        assert record['nonzero_Z']
        assert not record['nonzero_Q']

    def test_empty_chain(self, dual):
        """The zero chain is the zero class."""
        record = class_record(dual, {})
        assert record['cycle'] and not record['nonzero_Z']

    def test_t_action(self, dual):
        """t_g acts nontrivially for g = 1, 2."""
        report = homology_action_report(dual, 2)
        assert report.passed
        assert report.details['t_1']['shape_ok']
        assert set(report.details) == {'t_1', 't_2'}

    def test_mu_action(self, dual):
        """mu_g acts nontrivially for g = 1, 2."""
        assert mu_action_report(dual, 2).passed

    def test_chain_map_report_is_informational(self, dual):
        """The comparison runs on every small diagram and records a sign or None."""
        report = chain_map_report(dual, g_max=1)
        assert set(report.details) == {'l_2', 'l_3', 'mu_1', 't_1'}
        for entry in report.details.values():
            assert entry['sign'] in (1, -1, None)
