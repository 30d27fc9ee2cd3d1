import pytest
from hypothesis import given, strategies as st

from nfasat.cnf import (
    CnfError,
    CnfInstance,
    dimacs_text,
    final_var,
    parse_dimacs,
    prefix_path_var,
    trans_var,
)


def test_fresh_var_dense_numbering():
    inst = CnfInstance()
    assert inst.fresh_var(final_var(1)) == 1
    assert inst.fresh_var(trans_var(0, 1, 1)) == 2
    assert inst.fresh_var(final_var(1)) == 1
    assert inst.var_count == 2


def test_alias_shares_index_without_growth():
    inst = CnfInstance()
    base = inst.fresh_var(trans_var(0, 1, 1))
    alias = inst.alias_var(prefix_path_var((0,), 1), trans_var(0, 1, 1))
    assert alias == base
    assert inst.var_count == 1
    assert inst.lookup(prefix_path_var((0,), 1)) == base
    assert inst.name_of(base) == trans_var(0, 1, 1)


def test_alias_unregistered_target_fails():
    inst = CnfInstance()
    with pytest.raises(CnfError):
        inst.alias_var(prefix_path_var((0,), 1), trans_var(0, 1, 1))


def test_alias_conflicting_binding_fails():
    inst = CnfInstance()
    inst.fresh_var(final_var(1))
    inst.fresh_var(final_var(2))
    inst.alias_var(prefix_path_var((0,), 1), final_var(1))
    with pytest.raises(CnfError):
        inst.alias_var(prefix_path_var((0,), 1), final_var(2))


def test_duplicate_literals_merged():
    inst = CnfInstance()
    x = inst.fresh_var(final_var(1))
    inst.add_clause([x, x])
    assert inst.clauses == [(x,)]


def test_tautology_dropped():
    inst = CnfInstance()
    x = inst.fresh_var(final_var(1))
    inst.add_clause([x, -x])
    assert inst.clauses == []


def test_empty_clause_marks_unsat():
    inst = CnfInstance()
    inst.add_clause([])
    assert inst.trivially_unsat
    assert inst.clauses == [()]


def test_zero_literal_rejected():
    inst = CnfInstance()
    with pytest.raises(CnfError):
        inst.add_clause([0])


def test_unregistered_variable_rejected():
    inst = CnfInstance()
    with pytest.raises(CnfError):
        inst.add_clause([1])


def test_dimacs_single_unit():
    inst = CnfInstance()
    x = inst.fresh_var(final_var(1))
    inst.add_clause([x])
    assert dimacs_text(inst) == "p cnf 1 1\n1 0\n"


def test_dimacs_empty_instance():
    assert dimacs_text(CnfInstance()) == "p cnf 0 0\n"


def test_dimacs_negative_literal_line():
    inst = CnfInstance()
    inst.fresh_var(final_var(1))
    inst.fresh_var(final_var(2))
    inst.add_clause([-2, 1])
    assert "-2 1 0" in dimacs_text(inst)


def test_stats_histogram_sums_to_clause_count():
    inst = CnfInstance()
    x = inst.fresh_var(final_var(1))
    y = inst.fresh_var(final_var(2))
    inst.add_clause([x], family="a")
    inst.add_clause([x, y], family="b")
    inst.add_clause([-x, -y], family="b")
    assert sum(inst.arity_hist.values()) == inst.clause_count() == 3
    assert inst.family_clause_counts() == {"a": 1, "b": 2}


@given(
    st.lists(
        st.lists(st.integers(-6, 6).filter(lambda v: v != 0), min_size=1, max_size=4),
        max_size=15,
    )
)
def test_dimacs_round_trip(clause_lists):
    inst = CnfInstance()
    for i in range(1, 7):
        inst.fresh_var(final_var(i))
    for lits in clause_lists:
        inst.add_clause(lits)
    var_count, clauses = parse_dimacs(dimacs_text(inst))
    assert var_count == inst.var_count
    assert sorted(clauses) == sorted(inst.clauses)


def test_registry_round_trip_with_aliases():
    inst = CnfInstance()
    for i in range(1, 4):
        inst.fresh_var(final_var(i))
    inst.alias_var(prefix_path_var((0,), 2), final_var(2))
    for name in [final_var(1), final_var(2), final_var(3), prefix_path_var((0,), 2)]:
        idx = inst.lookup(name)
        canonical = inst.name_of(idx)
        assert inst.lookup(canonical) == idx
