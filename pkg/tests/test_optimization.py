"""Container construction, parameter updates, sanity checks and serialization."""

import math

import numpy as np
import pytest

from src.optimization import (
    ContainerError,
    LinearConstraint,
    ObjectiveSense,
    OptimizationContainer,
    ParameterError,
    ParamKey,
    Sense,
    VarKey,
    constraint_name,
    deserialize,
    sanity_check,
    serialize,
    structurally_equal,
    write_lp,
)
from src.optimization.keys import parse_constraint_name
from src.optimization.serialization import container_from_dict, container_to_dict

X = VarKey("ActivePower", "x", 1)
Y = VarKey("ActivePower", "y", 1)
DEMAND = ParamKey("ForecastBound", "load", 1)


def demand_container(demand=5.0):
    """min 2x + 3y  s.t.  x + y >= demand,  0 <= x <= 4,  0 <= y <= 10."""
    c = OptimizationContainer("toy")
    c.add_variable(X, 0.0, 4.0)
    c.add_variable(Y, 0.0, 10.0)
    c.add_parameter(DEMAND, demand)
    c.add_constraint(
        LinearConstraint(constraint_name("Balance", "system", 1), [(X, 1.0), (Y, 1.0)], Sense.GE, 0.0, {DEMAND: 1.0})
    )
    c.add_objective_term(X, 2.0)
    c.add_objective_term(Y, 3.0)
    return c


class TestVariables:
    def test_duplicate_variable_rejected(self):
        c = OptimizationContainer()
        c.add_variable(X)
        with pytest.raises(ContainerError):
            c.add_variable(X)

    def test_inverted_and_nan_bounds_rejected(self):
        c = OptimizationContainer()
        with pytest.raises(ContainerError):
            c.add_variable(X, 2.0, 1.0)
        with pytest.raises(ContainerError):
            c.add_variable(Y, math.nan, 1.0)

    def test_column_indices_follow_insertion(self):
        c = OptimizationContainer()
        assert c.add_variable(X) == 0
        assert c.add_variable(Y) == 1
        assert [v.key for v in c.variables_of_kind("ActivePower")] == [X, Y]

    def test_key_text(self):
        assert str(X) == "ActivePower(x,1)"
        assert X < Y


class TestConstraints:
    def test_unknown_variable_rejected(self):
        c = OptimizationContainer()
        c.add_variable(X)
        with pytest.raises(ContainerError):
            c.add_constraint(LinearConstraint("r", [(Y, 1.0)], Sense.LE, 1.0))

    def test_repeated_variable_rejected(self):
        c = OptimizationContainer()
        c.add_variable(X)
        with pytest.raises(ContainerError):
            c.add_constraint(LinearConstraint("r", [(X, 1.0), (X, 2.0)], Sense.LE, 1.0))

    def test_duplicate_name_rejected(self):
        c = demand_container()
        with pytest.raises(ContainerError, match="duplicate constraint name"):
            c.add_constraint(LinearConstraint("Balance::system::1", [(X, 1.0)], Sense.LE, 1.0))

    def test_unknown_parameter_rejected(self):
        c = OptimizationContainer()
        c.add_variable(X)
        with pytest.raises(ParameterError):
            c.add_constraint(LinearConstraint("r", [(X, 1.0)], Sense.LE, 0.0, {DEMAND: 1.0}))

    def test_constraint_names_round_trip(self):
        name = constraint_name("FlowLimitUp", "line::a", 7)
        assert name == "FlowLimitUp::line::a::7"
        assert parse_constraint_name(name) == ("FlowLimitUp", "line::a", 7)

    def test_family_lookup(self):
        c = demand_container()
        assert [con.name for con in c.constraints_of_family("Balance")] == ["Balance::system::1"]
        assert c.parameter_rows(DEMAND) == ["Balance::system::1"]


class TestParameters:
    def test_update_changes_rhs_not_structure(self):
        c = demand_container(5.0)
        before = c.to_standard_form()
        version = c.structure_version
        fingerprint = c.fingerprint
        c.update_parameter(DEMAND, 3.0)
        after = c.to_standard_form()
        assert before.b[0] == 5.0
        assert after.b[0] == 3.0
        assert c.structure_version == version
        assert c.fingerprint == fingerprint
        assert after.A is before.A

    def test_update_unknown_or_nonfinite(self):
        c = demand_container()
        with pytest.raises(ParameterError):
            c.update_parameter(ParamKey("ForecastBound", "nope", 1), 1.0)
        with pytest.raises(ParameterError):
            c.update_parameter(DEMAND, math.nan)
        assert c.parameter_value(DEMAND) == 5.0

    def test_readd_is_noop(self):
        c = demand_container(5.0)
        c.add_parameter(DEMAND, 9.0)
        assert c.parameter_value(DEMAND) == 5.0

    def test_bind_to_existing_row(self):
        c = demand_container(5.0)
        extra = ParamKey("FeedforwardStartAllowance", "x", 1)
        c.add_parameter(extra, 0.0)
        version = c.structure_version
        c.bind_parameter("Balance::system::1", extra, 2.0)
        assert c.structure_version != version
        assert c.parameter_rows(extra) == ["Balance::system::1"]
        c.update_parameter(extra, 1.5)
        assert c.to_standard_form().b[0] == pytest.approx(8.0)
        with pytest.raises(ParameterError, match="already bound"):
            c.bind_parameter("Balance::system::1", extra, 1.0)
        with pytest.raises(ParameterError, match="unknown parameter"):
            c.bind_parameter("Balance::system::1", ParamKey("ForecastBound", "nope", 1), 1.0)

    def test_objective_parameter_terms(self):
        c = demand_container()
        price = ParamKey("ForecastBound", "price", 1)
        c.add_parameter(price, 4.0)
        c.add_objective_parameter_term(X, price, -1.0)
        c.add_objective_parameter_constant(price, 2.0)
        sf = c.to_standard_form()
        assert sf.c[0] == pytest.approx(2.0 - 4.0)
        assert sf.c0 == pytest.approx(8.0)
        c.update_parameter(price, 1.0)
        sf = c.to_standard_form()
        assert sf.c[0] == pytest.approx(1.0)
        assert sf.c0 == pytest.approx(2.0)


class TestStandardForm:
    def test_senses_and_bounds(self):
        sf = demand_container().to_standard_form()
        assert sf.shape == (1, 2)
        assert sf.senses.tolist() == [-1]
        np.testing.assert_array_equal(sf.ub, [4.0, 10.0])
        assert sf.sense is ObjectiveSense.MIN
        assert sf.row_names == ["Balance::system::1"]

    def test_evaluate_objective(self):
        c = demand_container()
        assert c.evaluate_objective({X: 4.0, Y: 1.0}) == pytest.approx(11.0)

    def test_expressions_accumulate(self):
        from src.optimization import ExpressionKey

        c = demand_container()
        key = ExpressionKey("Balance", "b1", 1)
        c.add_to_expression(key, X, 1.0)
        c.add_to_expression(key, X, 0.5)
        c.add_parameter_to_expression(key, DEMAND, -1.0)
        expression = c.expression(key)
        assert expression.terms[X] == 1.5
        assert expression.params[DEMAND] == -1.0
        assert c.expression(ExpressionKey("Balance", "b2", 1)).is_empty


class TestSanity:
    def test_clean_container(self):
        assert sanity_check(demand_container()).is_clean

    def test_coefficient_range_warning(self):
        c = demand_container()
        c.add_constraint(LinearConstraint("Tiny::x::1", [(X, 1e-9)], Sense.LE, 1.0))
        report = sanity_check(c)
        assert not report.fatal
        assert [f.check for f in report.warnings] == ["coefficient range"]
        assert report.warnings[0].location == f"Tiny::x::1[{X}]"

    def test_empty_row_and_infinite_rhs_are_fatal(self):
        c = demand_container()
        c.add_constraint(LinearConstraint("Empty::x::1", [], Sense.LE, 1.0))
        c.add_constraint(LinearConstraint("Inf::x::1", [(X, 1.0)], Sense.LE, math.inf))
        checks = {(f.check, f.location) for f in sanity_check(c).fatal}
        assert ("empty constraint", "Empty::x::1") in checks
        assert ("nonfinite value", "Inf::x::1.rhs") in checks


class TestSerialization:
    def test_round_trip_is_structurally_equal(self, tmp_path):
        c = demand_container()
        c.add_variable(VarKey("OnStatus", "x", 1), 0.0, 1.0, integral=True)
        c.stamp_build_time()
        path = serialize(c, tmp_path / "toy.json")
        loaded = deserialize(path)
        assert structurally_equal(c, loaded)
        assert loaded.fingerprint == c.fingerprint
        assert loaded.metadata["built_at"] == c.metadata["built_at"]
        assert loaded.parameter_value(DEMAND) == 5.0

    def test_changed_container_differs(self):
        a = demand_container()
        b = demand_container()
        b.add_variable(VarKey("ActivePower", "z", 1))
        assert not structurally_equal(a, b)

    def test_foreign_document_rejected(self):
        data = container_to_dict(demand_container())
        data["format"] = "something-else"
        with pytest.raises(ValueError):
            container_from_dict(data)


def test_write_lp_sections(tmp_path):
    c = demand_container()
    c.add_variable(VarKey("OnStatus", "unit a", 1), 0.0, 1.0, integral=True)
    text = write_lp(c, tmp_path / "toy.lp").read_text()
    for section in ("Minimize", "Subject To", "Bounds", "Generals", "End"):
        assert section in text
    assert "OnStatus_unit_a_1" in text
    assert "Balance__system__1" in text
