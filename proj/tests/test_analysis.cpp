#include <gtest/gtest.h>

#include "tensiform/analysis.hpp"
#include "tensiform/fixtures.hpp"
#include "tensiform/geometry.hpp"

using namespace tensiform;

namespace {

ConvergedState solved_simplex(const Model& m)
{
    SolveOptions o;
    o.seed = 4;
    return minimize_constrained(m, o);
}

}  // namespace

TEST(Equilibrium, ConvergedSimplexBalances)
{
    const Model m = fixtures::make_simplex();
    const DofMap dofs = build_dof_map(m);
    const auto s = solved_simplex(m);
    ASSERT_TRUE(s.converged);
    const auto r = equilibrium_residual(m, dofs, s.coords, s.forces);
    EXPECT_LE(r.inf_norm, 1e-7 * s.residual_scale);
    EXPECT_LE(r.relative_norm, 1e-7);
    EXPECT_EQ(r.node_residuals.size(), 6u);
    const auto struts = m.strut_ids();
    for (std::size_t i = 0; i < struts.size(); ++i) {
        EXPECT_EQ(r.member_forces[struts[i]], s.forces.strut_multipliers[i]);
        EXPECT_LT(r.force_densities[struts[i]], 0.0);
    }
}

TEST(Equilibrium, WithoutStrutTermsResidualIsLarge)
{
    const Model m = fixtures::make_simplex();
    const DofMap dofs = build_dof_map(m);
    auto s = solved_simplex(m);
    s.forces.strut_multipliers.clear();
    EXPECT_GT(equilibrium_residual(m, dofs, s.coords, s.forces).relative_norm, 0.1);
}

TEST(Equilibrium, MultiplierCountChecked)
{
    const Model m = fixtures::make_simplex();
    const DofMap dofs = build_dof_map(m);
    auto s = solved_simplex(m);
    s.forces.strut_multipliers.pop_back();
    EXPECT_THROW(equilibrium_residual(m, dofs, s.coords, s.forces), std::invalid_argument);
}

TEST(ExtendedDensities, ReproduceWeights)
{
    for (int p : {2, 4}) {
        Model m = fixtures::make_simplex(10.0, 1.7, p);
        const DofMap dofs = build_dof_map(m);
        const auto s = solved_simplex(m);
        for (const auto& d : extended_force_densities(m, dofs, s.coords, s.forces)) {
            const double w = p == 2 ? d.w2 : d.w4;
            EXPECT_NEAR(w, 1.7, 1e-12 * 1.7);
            EXPECT_NEAR(d.q * d.length, d.force, 1e-12 * std::abs(d.force));
        }
    }
}

TEST(ExtendedDensities, RoundTripForces)
{
    const Model m = fixtures::make_strut20(3);
    const DofMap dofs = build_dof_map(m);
    SolveOptions o;
    o.max_iterations = 50;
    const auto s = minimize_constrained(m, o);
    for (const auto& d : extended_force_densities(m, dofs, s.coords, s.forces)) {
        EXPECT_NEAR(d.q * d.length, d.force, 1e-12 * std::abs(d.force));
        EXPECT_NEAR(2.0 * d.w2 * d.length, d.force, 1e-12 * std::abs(d.force));
        EXPECT_NEAR(4.0 * d.w4 * d.length * d.length * d.length, d.force, 1e-12 * std::abs(d.force));
    }
}

TEST(ExtendedDensities, ZeroLengthThrows)
{
    Model m = fixtures::make_net(2, 2, {0, 1, 2});
    m.nodes[3].position = m.nodes[1].position;
    const DofMap dofs = build_dof_map(m);
    GeneralizedForces f;
    f.member_forces.assign(m.members.size(), 1.0);
    EXPECT_THROW(extended_force_densities(m, dofs, model_coordinates(m, dofs), f), DegenerateGeometry);
}

TEST(VirtualWork, VanishesAtEquilibriumOnly)
{
    const Model m = fixtures::make_simplex();
    const DofMap dofs = build_dof_map(m);
    const auto s = solved_simplex(m);
    EXPECT_LE(virtual_work_check(m, dofs, s.coords, s.forces, 1, 20), 1e-8);

    // Away from equilibrium a random tangent variation does work.
    const Coordinates x = project_strut_lengths(m, dofs, random_initialization(dofs.size(), 2.5, 3));
    const auto g = total_gradient(m, dofs, x);
    EXPECT_GT(virtual_work_check(m, dofs, x, g.forces, 1, 20), 1e-3);
}

TEST(VirtualWork, LinearInVariation)
{
    const Model m = fixtures::make_simplex();
    const DofMap dofs = build_dof_map(m);
    const Coordinates x = project_strut_lengths(m, dofs, random_initialization(dofs.size(), 2.5, 3));
    const auto f = total_gradient(m, dofs, x).forces;
    const Eigen::VectorXd a = random_initialization(dofs.size(), 1.0, 10);
    const Eigen::VectorXd b = random_initialization(dofs.size(), 1.0, 11);
    const double wa = virtual_work(m, dofs, x, f, a), wb = virtual_work(m, dofs, x, f, b);
    EXPECT_NEAR(virtual_work(m, dofs, x, f, 2.0 * a + b), 2.0 * wa + wb, 1e-9 * (std::abs(wa) + std::abs(wb)));
    // Without struts the work equals the energy gradient dotted with the variation.
    EXPECT_NEAR(wa, total_gradient(m, dofs, x).gradient.dot(a), 1e-9 * std::abs(wa));
}

TEST(MeasureStats, KnownValues)
{
    const auto s = measure_stats({1, 2, 3, 4});
    EXPECT_DOUBLE_EQ(s.total, 10.0);
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_DOUBLE_EQ(s.stddev, std::sqrt(1.25));
    EXPECT_DOUBLE_EQ(s.coefficient_of_variation, std::sqrt(1.25) / 2.5);
    EXPECT_EQ(s.min, 1.0);
    EXPECT_EQ(s.max, 4.0);
    ASSERT_EQ(s.histogram.size(), 10u);
    EXPECT_EQ(s.histogram.front(), 1);
    EXPECT_EQ(s.histogram.back(), 1);
    int total = 0;
    for (int c : s.histogram) total += c;
    EXPECT_EQ(total, 4);
    EXPECT_EQ(measure_stats({}).total, 0.0);
}

TEST(Compare, OneRowPerFunctionalWithSharedSeed)
{
    const Model m = fixtures::make_simplex();
    SolveOptions o;
    o.seed = 6;
    const auto rows = compare_functionals(m, {PowerLength{1.0, 4}, PowerLength{1.0, 3}, PowerArea{1.0, 2}}, o);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_TRUE(rows[0].ok);
    EXPECT_TRUE(rows[0].converged);
    EXPECT_EQ(rows[0].measure.histogram.size(), 10u);
    EXPECT_NEAR(rows[0].measure.total, rows[0].total_length, 1e-9);
    EXPECT_TRUE(rows[1].ok);
    // The simplex has no triangles, so an area functional has nothing to act on.
    EXPECT_TRUE(rows[2].ok || !rows[2].error.empty());
    // Row 0 is the simplex as built; it must agree with a direct solve.
    EXPECT_EQ(rows[0].coords, minimize_constrained(m, o).coords);
}

TEST(Compare, FailingRowDoesNotStopOthers)
{
    const Model m = fixtures::make_simplex();
    SolveOptions o;
    o.seed = 6;
    const auto rows = compare_functionals(m, {PowerLength{-1.0, 4}, PowerLength{1.0, 4}}, o);
    EXPECT_FALSE(rows[0].ok);
    EXPECT_FALSE(rows[0].error.empty());
    EXPECT_TRUE(rows[1].ok);
}
