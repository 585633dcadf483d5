"""Tests for the bracket-basis builder, exact projection, and the
class-by-class comparison report.

Frozen presentation entries were verified against an independent
free-word oracle (and, for the dependency records, by brute-force
re-expansion) before being pinned here.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fwforge.comparator import (
    build_basis,
    diff_report,
    min_hbar_order,
    project,
)
from fwforge.eriksen import reference_target
from fwforge.ncalg import (
    AbstractExpr,
    Acomm,
    BetaF,
    Budget,
    Comm,
    Gen,
    MPow,
    PowN,
    Prod,
    Rat,
    Sum,
    expand,
)
from fwforge.stepwise import reference_iterative

O = Gen("O")
E = Gen("E")
O2 = PowN(O, 2)


def sc(q, *factors):
    return Prod((Rat(Fraction(q)),) + tuple(factors))


# -- basis construction -----------------------------------------------------------


def test_small_basis_contains_double_commutator():
    basis = build_basis(Budget(3, 1))
    element = basis.element("comm(O, comm(O, E))")
    assert element.order == 1
    assert (element.e_count, element.o_count) == (1, 2)


def test_budget_or_ints_accepted():
    via_budget = build_basis(Budget(3, 1))
    via_ints = build_basis(3, 1)
    assert [el.text for el in via_budget.elements] == [el.text for el in via_ints.elements]


def test_order_two_pair(basis42):
    assert basis42.element("pow(comm(O, E), 2)").order == 2
    assert basis42.element("comm(comm(pow(O, 2), E), E)").order == 2


def test_recorded_dependency_for_padded_spelling(basis42):
    dep = {d.text: d for d in basis42.dependencies}["acomm(O, comm(comm(O, E), E))"]
    assert dep.members == (
        ("comm(comm(pow(O, 2), E), E)", Fraction(1)),
        ("pow(comm(O, E), 2)", Fraction(-2)),
    )


def test_all_small_basis_dependencies_reexpand_exactly(basis42):
    budget = Budget(4, 2)
    assert basis42.dependencies
    for dep in basis42.dependencies:
        total = AbstractExpr.zero()
        for text, weight in dep.members:
            total = total.add(basis42.element(text).expansion.scale(weight))
        assert expand(dep.tree, budget).sub(total).is_zero(), dep.text


def test_sampled_full_basis_dependencies_reexpand_exactly(basis83, budget83):
    deps = basis83.dependencies[::97]
    assert deps
    for dep in deps:
        total = AbstractExpr.zero()
        for text, weight in dep.members:
            total = total.add(basis83.element(text).expansion.scale(weight))
        assert expand(dep.tree, budget83).sub(total).is_zero(), dep.text


def test_full_basis_shape_is_frozen(basis83):
    assert len(basis83.elements) == 6208
    assert len(basis83.dependencies) == 5956


def test_listing_order_and_determinism():
    first = build_basis(Budget(5, 2))
    second = build_basis(Budget(5, 2))
    keys = [(el.order, el.klass, el.text) for el in first.elements]
    assert keys == sorted(keys)
    assert keys == [(el.order, el.klass, el.text) for el in second.elements]
    assert [d.text for d in first.dependencies] == [d.text for d in second.dependencies]


def test_elements_store_exact_unmixed_expansions(basis42):
    for element in basis42.elements:
        words = {word for (_, word, _), _ in element.expansion.terms()}
        assert words, element.text
        parities = {(len(w) - w.count("E")) % 2 for w in words}
        assert len(parities) == 1, element.text


# -- projection -------------------------------------------------------------------


def test_project_basis_member_onto_itself(basis83, budget83):
    piece = expand(Comm(O, Comm(O, E)), budget83)
    result = project(piece, basis83)
    assert [(e.element.text, e.weight, e.m_exp) for e in result.entries] == [
        ("comm(O, comm(O, E))", Fraction(1), 0)
    ]
    assert result.residual.is_zero()
    assert result.reconstruct().sub(piece).is_zero()


def test_project_zero(basis83):
    result = project(AbstractExpr.zero(), basis83)
    assert result.entries == ()
    assert result.residual.is_zero()


def test_project_rejects_mixed_classes(basis83, budget83):
    mixed = expand(Comm(O, Comm(O, E)), budget83).add(
        expand(PowN(Comm(O, E), 2), budget83)
    )
    with pytest.raises(ValueError):
        project(mixed, basis83)


def test_quartic_display_difference_projects_onto_three_brackets(basis83, budget83):
    """The two displayed quartic-class blocks differ by an exact
    three-bracket combination with zero residual."""
    mine = expand(reference_target("order2"), budget83).restrict_class(2, 4)
    other = expand(reference_iterative(), budget83).restrict_class(2, 4)
    result = project(mine.sub(other), basis83)
    assert [(e.element.text, e.weight, e.beta_exp, e.m_exp) for e in result.entries] == [
        ("pow(comm(pow(O, 2), E), 2)", Fraction(-19, 256), 1, -5),
        ("acomm(pow(O, 2), comm(comm(pow(O, 2), E), E))", Fraction(-7, 128), 1, -5),
        ("acomm(pow(O, 2), pow(comm(O, E), 2))", Fraction(3, 32), 1, -5),
    ]
    assert result.residual.is_zero()
    assert result.reconstruct().sub(mine.sub(other)).is_zero()


def test_min_order_filter_restricts_vocabulary(basis83, budget83):
    piece = expand(
        sc(Fraction(9, 1024), MPow(-6), Comm(O2, Comm(O2, Comm(O, Comm(O, E))))),
        budget83,
    )
    assert min_hbar_order(piece, basis83) == 3
    result = project(piece, basis83, min_order=3)
    assert [(e.element.text, e.weight) for e in result.entries] == [
        ("comm(pow(O, 2), comm(pow(O, 2), comm(O, comm(O, E))))", Fraction(9, 1024))
    ]
    assert result.residual.is_zero()


def test_certification_of_simple_brackets(basis83, budget83):
    assert min_hbar_order(expand(Comm(O, Comm(O, E)), budget83), basis83) == 1
    assert (
        min_hbar_order(expand(Comm(Comm(O2, E), E), budget83), basis83) == 2
    )


def test_residual_captures_out_of_span_content(basis42):
    # A single bare word with two potential letters is not a bracket
    # combination: everything lands in the residual, reconstruct holds.
    piece = AbstractExpr.from_terms([((0, "EE", 0), Fraction(1))])
    result = project(piece, basis42)
    assert result.entries == ()
    assert not result.residual.is_zero()
    assert result.reconstruct().sub(piece).is_zero()


@st.composite
def basis_combinations(draw):
    # indices into classes the small basis actually populates
    klass = draw(st.sampled_from([(1, 2), (1, 3), (2, 1), (2, 2)]))
    picks = draw(
        st.lists(
            st.tuples(
                st.integers(min_value=0, max_value=50),
                st.integers(min_value=-8, max_value=8).filter(lambda n: n != 0),
                st.integers(min_value=-3, max_value=0),
            ),
            min_size=1,
            max_size=3,
        )
    )
    return klass, picks


@given(combo=basis_combinations())
@settings(max_examples=40, deadline=None)
def test_projection_reconstructs_arbitrary_span_members(basis42, combo):
    klass, picks = combo
    elements = basis42.class_elements(*klass)
    piece = AbstractExpr.zero()
    chosen_orders = []
    for index, weight, m_shift in picks:
        element = elements[index % len(elements)]
        chosen_orders.append(element.order)
        piece = piece.add(element.expansion.scale(Fraction(weight)).shift_m(m_shift))
    if piece.is_zero():
        return
    result = project(piece, basis42, min_order=0)
    assert result.residual.is_zero()
    assert result.reconstruct().sub(piece).is_zero()
    certified = min_hbar_order(piece, basis42)
    assert certified is not None
    assert certified >= min(chosen_orders)


# -- comparison report ------------------------------------------------------------


def test_report_identical_classes(report83):
    rows = {(r.e_count, r.o_count): r for r in report83.classes}
    for klass in [(0, 0), (0, 2), (0, 4), (0, 6), (0, 8), (1, 0), (1, 2)]:
        assert rows[klass].status == "identical", klass
        assert rows[klass].projection is None


def test_report_differing_classes_and_presentations(report83):
    rows = {(r.e_count, r.o_count): r for r in report83.classes}
    differing = {k for k, r in rows.items() if r.status == "differs"}
    assert differing == {(1, 4), (1, 6), (2, 2), (2, 4), (2, 6), (3, 2), (3, 4)}

    def entries(klass):
        return [
            (str(e.weight), e.beta_exp, e.m_exp, e.element.text)
            for e in rows[klass].projection.entries
        ]

    assert rows[(1, 4)].hbar_order_min == 2
    assert entries((1, 4)) == [
        ("-1/32", 0, -4, "comm(pow(O, 2), comm(pow(O, 2), E))")
    ]
    assert rows[(1, 6)].hbar_order_min == 2
    assert entries((1, 6)) == [
        ("29/512", 0, -6, "acomm(pow(O, 2), comm(pow(O, 2), comm(pow(O, 2), E)))"),
        ("-11/1024", 0, -6, "acomm(O, acomm(O, comm(pow(O, 2), comm(pow(O, 2), E))))"),
    ]
    assert rows[(2, 2)].hbar_order_min == 2
    assert entries((2, 2)) == [
        ("1/16", 1, -3, "comm(comm(pow(O, 2), E), E)")
    ]
    assert rows[(2, 4)].hbar_order_min == 2
    assert len(entries((2, 4))) == 3
    assert rows[(2, 6)].hbar_order_min == 2
    assert rows[(3, 2)].hbar_order_min == 3
    assert entries((3, 2)) == [
        ("-1/32", 0, -4, "comm(O, comm(comm(comm(O, E), E), E))")
    ]
    assert rows[(3, 4)].hbar_order_min == 4
    assert len(entries((3, 4))) == 12


def test_report_reconstruction_and_residuals(report83, eriksen83, static13_83):
    for row in report83.classes:
        if row.projection is None:
            continue
        delta = eriksen83.restrict_class(row.e_count, row.o_count).sub(
            static13_83.restrict_class(row.e_count, row.o_count)
        )
        assert row.projection.residual.is_zero()
        assert row.projection.reconstruct().sub(delta).is_zero()


def test_report_projection_idempotent(report83, eriksen83, static13_83, basis83):
    for row in report83.classes:
        if row.projection is None:
            continue
        again = project(
            row.projection.reconstruct(), basis83, min_order=row.hbar_order_min
        )
        assert [
            (e.element.text, e.weight, e.beta_exp, e.m_exp) for e in again.entries
        ] == [
            (e.element.text, e.weight, e.beta_exp, e.m_exp)
            for e in row.projection.entries
        ]


def test_every_difference_certifies_at_order_two_or_deeper(report83):
    assert report83.clean
    for row in report83.classes:
        if row.status == "differs":
            assert row.hbar_order_min is not None and row.hbar_order_min >= 2


def test_report_json_schema(report83):
    data = report83.to_json_dict()
    assert set(data) == {"budget", "classes"}
    assert data["budget"] == {"max_word_len": 8, "max_e_count": 3}
    for row in data["classes"]:
        assert set(row) == {"e", "o", "status", "hbar_order_min", "basis_terms", "residual"}
        for term in row["basis_terms"]:
            assert set(term) == {"bracket_text", "coeff", "m_exp"}
            assert isinstance(term["coeff"], str)
        assert row["residual"] == []
    by_class = {(row["e"], row["o"]): row for row in data["classes"]}
    assert by_class[(2, 2)]["basis_terms"] == [
        {
            "bracket_text": "beta * comm(comm(pow(O, 2), E), E)",
            "coeff": "1/16",
            "m_exp": -3,
        }
    ]
    assert by_class[(0, 2)] == {
        "e": 0,
        "o": 2,
        "status": "identical",
        "hbar_order_min": None,
        "basis_terms": [],
        "residual": [],
    }


def test_report_text_rendering(report83):
    text = report83.to_text()
    assert "class comparison at word length <= 8, E count <= 3" in text
    assert "(1,4)" in text and "(2,2)" in text
    assert "identical" in text and "differs" in text
    assert "comm(comm(pow(O, 2), E), E)" in text


def test_report_on_equal_inputs(basis42):
    budget = Budget(4, 2)
    same = expand(Sum((sc(Fraction(1, 2), Comm(O, Comm(O, E))), E)), budget)
    report = diff_report(same, same, budget, basis42)
    assert all(row.status == "identical" for row in report.classes)
    assert report.clean
