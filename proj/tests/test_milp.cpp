// Model container semantics: expressions, constraints, objective, and the
// binary-fixing step that turns a solved MILP into a pricing LP.

#include <catch2/catch_amalgamated.hpp>

#include "sparsched/milp.hpp"

using namespace sparsched;

TEST_CASE("linear expressions merge and cancel terms") {
    LinExpr e;
    e.add(0, 1.5).add(1, -2.0).add(0, 0.5);
    CHECK(e.terms().size() == 2);
    CHECK(e.terms().at(0) == 2.0);
    e.add(0, -2.0);  // exact cancellation removes the term
    CHECK(e.terms().count(0) == 0);
    e.add(3, 0.0);  // explicit zero coefficient is dropped
    CHECK(e.terms().count(3) == 0);
    e.add_constant(4.0).add_constant(-1.0);
    CHECK(e.constant() == 3.0);

    LinExpr f;
    f.add(1, 1.0).add_constant(2.0);
    e.add(f, 3.0);  // e += 3f
    CHECK(e.terms().at(1) == 1.0);  // -2 + 3
    CHECK(e.constant() == 9.0);

    CHECK_THROWS_AS(e.add(-1, 1.0), StructuralError);
    CHECK_THROWS_AS(e.add(0, std::nan("")), StructuralError);
}

TEST_CASE("model bookkeeping and name uniqueness") {
    MilpModel m("demo");
    const int x = m.add_continuous("x", 0.0, 10.0);
    const int y = m.add_continuous("y", -kInf, kInf);
    const int b = m.add_binary("b");
    CHECK(m.num_vars() == 3);
    CHECK(m.num_binaries() == 1);
    CHECK(m.var_index("y") == y);
    CHECK(m.var(b).lb == 0.0);
    CHECK(m.var(b).ub == 1.0);
    CHECK(m.has_var("x"));
    CHECK(!m.has_var("z"));
    CHECK_THROWS_AS(m.var_index("z"), StructuralError);
    CHECK_THROWS_AS(m.add_continuous("x", 0, 1), StructuralError);
    CHECK_THROWS_AS(m.add_continuous("", 0, 1), StructuralError);
    CHECK_THROWS_AS(m.add_continuous("w", 2.0, 1.0), StructuralError);

    LinExpr e;
    e.add(x, 1.0).add(y, 2.0);
    m.add_constraint("c1", e, Sense::LE, 3.0);
    CHECK(m.num_constraints() == 1);
    CHECK(m.con(0).sense == Sense::LE);
    CHECK(m.con(0).rhs == 3.0);
    CHECK_THROWS_AS(m.add_constraint("c1", e, Sense::LE, 4.0), StructuralError);
    CHECK_THROWS_AS(m.add_constraint("c2", LinExpr{}, Sense::LE, 0.0),
                    StructuralError);
    CHECK_THROWS_AS(m.add_constraint("c3", e, Sense::LE, kInf), StructuralError);

    SECTION("expression constants fold onto the right-hand side") {
        LinExpr f;
        f.add(x, 1.0).add_constant(5.0);
        m.add_constraint("c4", f, Sense::EQ, 8.0);
        CHECK(m.con(m.con_index("c4")).rhs == 3.0);
    }

    SECTION("constraints may not reference unknown variable indices") {
        LinExpr f;
        f.add(17, 1.0);
        CHECK_THROWS_AS(m.add_constraint("c5", f, Sense::LE, 0.0),
                        StructuralError);
    }
}

TEST_CASE("objective accumulates terms and carries a constant") {
    MilpModel m;
    const int x = m.add_continuous("x", 0, 1);
    const int y = m.add_continuous("y", 0, 1);
    LinExpr e;
    e.add(x, 2.0).add_constant(10.0);
    m.add_objective(e);
    LinExpr f;
    f.add(x, -2.0).add(y, 1.0).add_constant(1.0);
    m.add_objective(f);
    CHECK(m.objective().count(x) == 0);  // cancelled
    CHECK(m.objective().at(y) == 1.0);
    CHECK(m.objective_constant() == 11.0);
    m.set_objective_constant(-4.0);
    CHECK(m.objective_constant() == -4.0);
}

TEST_CASE("annotations attach roles to existing constraints") {
    MilpModel m;
    const int x = m.add_continuous("x", 0, 1);
    LinExpr e;
    e.add(x, 1.0);
    m.add_constraint("bal", e, Sense::EQ, 1.0);
    m.annotate("bal", "balance bus=3 t=7");
    CHECK(m.annotations().at("bal") == "balance bus=3 t=7");
    CHECK_THROWS_AS(m.annotate("nope", "x"), StructuralError);
}

TEST_CASE("fix_binary pins near-integral values and rejects fractional ones") {
    MilpModel m;
    m.add_binary("u");
    m.add_binary("v");
    m.add_continuous("x", 0, 1);
    m.fix_binary("u", 0.99997);
    m.fix_binary("v", 2e-5);
    CHECK(m.num_binaries() == 0);
    CHECK(m.var(m.var_index("u")).lb == 1.0);
    CHECK(m.var(m.var_index("u")).ub == 1.0);
    CHECK(m.var(m.var_index("v")).ub == 0.0);

    MilpModel m2;
    m2.add_binary("u");
    CHECK_THROWS_AS(m2.fix_binary("u", 0.4), ConsistencyError);
    CHECK_THROWS_AS(m2.fix_binary("u", 1.2), ConsistencyError);
    MilpModel m3;
    m3.add_continuous("x", 0, 1);
    CHECK_THROWS_AS(m3.fix_binary("x", 1.0), StructuralError);
}
