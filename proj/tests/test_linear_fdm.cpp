#include <gtest/gtest.h>

#include <random>

#include "tensiform/fixtures.hpp"
#include "tensiform/geometry.hpp"
#include "tensiform/linear_fdm.hpp"

using namespace tensiform;

namespace {

// Residual of projecting v onto the column span of an orthonormal basis.
double span_residual(const Eigen::MatrixXd& basis, const Eigen::VectorXd& v)
{
    const Eigen::VectorXd u = v.normalized();
    return (u - basis * (basis.transpose() * u)).norm();
}

}  // namespace

TEST(LinearFdm, BranchNodeMatrixOfXTensegrity)
{
    Eigen::MatrixXi expected(6, 4);
    expected << 1, 0, -1, 0,  //
        1, 0, 0, -1,          //
        0, 1, -1, 0,          //
        0, 1, 0, -1,          //
        1, -1, 0, 0,          //
        0, 0, 1, -1;
    EXPECT_EQ(build_branch_node_matrix(fixtures::make_x_tensegrity()).entries, expected);
}

TEST(LinearFdm, SymbolicDMatrixPattern)
{
    const Model m = fixtures::make_x_tensegrity();
    const std::vector<double> q{1.5, 2.5, 3.5, 4.5, -0.5, -1.25};
    const Eigen::MatrixXd d = assemble_full_D(m, q);
    Eigen::Matrix4d expected;
    expected << -q[0] - q[1] - q[4], q[4], q[0], q[1],  //
        q[4], -q[2] - q[3] - q[4], q[2], q[3],          //
        q[0], q[2], -q[0] - q[2] - q[5], q[5],          //
        q[1], q[3], q[5], -q[1] - q[3] - q[5];
    EXPECT_EQ(d, expected);
}

TEST(LinearFdm, PrintedMatrices)
{
    const Model m = fixtures::make_x_tensegrity();
    Eigen::Matrix4d d1, d2;
    d1 << -1, -1, 1, 1, -1, -1, 1, 1, 1, 1, -1, -1, 1, 1, -1, -1;
    d2 << -3, -1, 2, 2, -1, -3, 2, 2, 2, 2, -3, -1, 2, 2, -1, -3;
    EXPECT_EQ(assemble_full_D(m, {1, 1, 1, 1, -1, -1}), d1);
    EXPECT_EQ(assemble_full_D(m, {2, 2, 2, 2, -1, -1}), d2);
    const DMatrices parts = assemble_D(m, {1, 1, 1, 1, -1, -1});
    EXPECT_EQ(parts.free_free, d1);
    EXPECT_EQ(parts.free_fixed.size(), 0);
}

TEST(LinearFdm, NullSpaceOfPrintedCases)
{
    const Model m = fixtures::make_x_tensegrity();
    const auto r3 = null_space_analysis(assemble_full_D(m, {1, 1, 1, 1, -1, -1}));
    EXPECT_EQ(r3.nullity, 3);
    EXPECT_EQ(r3.rank, 1);
    EXPECT_LE(span_residual(r3.basis, Eigen::Vector4d(1, 1, 1, 1)), 1e-10);
    EXPECT_LE(span_residual(r3.basis, Eigen::Vector4d(1, -1, 0, 0)), 1e-10);
    EXPECT_LE(span_residual(r3.basis, Eigen::Vector4d(0, 0, 1, -1)), 1e-10);
    EXPECT_TRUE((r3.basis.transpose() * r3.basis).isApprox(Eigen::Matrix3d::Identity(), 1e-12));

    const auto r1 = null_space_analysis(assemble_full_D(m, {2, 2, 2, 2, -1, -1}));
    EXPECT_EQ(r1.nullity, 1);
    EXPECT_LE(span_residual(r1.basis, Eigen::Vector4d(1, 1, 1, 1)), 1e-10);
}

TEST(LinearFdm, NoFixedNodesRefusesWithReport)
{
    const Model m = fixtures::make_x_tensegrity();
    try {
        solve_linear_fdm(m, {1, 1, 1, 1, -1, -1});
        FAIL() << "expected SingularSystem";
    } catch (const SingularSystem& e) {
        EXPECT_EQ(e.report().nullity, 3);
    }
}

TEST(LinearFdm, SingularWithFixedNodes)
{
    // A free node held only by a zero-density member has a singular block.
    Model m = fixtures::make_net(2, 2, {0, 1, 2});
    EXPECT_THROW(solve_linear_fdm(m, {1, 0, 1, 0}), SingularSystem);
}

TEST(LinearFdm, NetSolveSatisfiesEquilibrium)
{
    const Model m = fixtures::make_net(6, 5);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    std::vector<double> q(m.members.size());
    for (auto& v : q) v = u(rng);
    const LinearSolution sol = solve_linear_fdm(m, q);
    const DofMap dofs = build_dof_map(m);
    const auto pos = node_positions(m, dofs, sol.coords);

    std::vector<Vec3> force(m.nodes.size(), Vec3::Zero());
    for (const auto& mem : m.members) {
        const Vec3 d = pos[mem.endpoints[1]] - pos[mem.endpoints[0]];
        force[mem.endpoints[0]] += q[mem.id] * d;
        force[mem.endpoints[1]] -= q[mem.id] * d;
        EXPECT_NEAR(sol.lengths[mem.id], d.norm(), 1e-12);
        EXPECT_NEAR(sol.tensions[mem.id], q[mem.id] * d.norm(), 1e-12);
    }
    for (int node : dofs.free_nodes) EXPECT_LE(force[node].norm(), 1e-10);
}

TEST(LinearFdm, MixedSignDensitiesSolvable)
{
    Model m = fixtures::make_net(3, 3);
    std::vector<double> q(m.members.size(), 1.0);
    q[0] = -0.2;
    const LinearSolution sol = solve_linear_fdm(m, q);
    EXPECT_EQ(sol.coords.size(), 3 * 5);
    EXPECT_TRUE(sol.coords.allFinite());
}

TEST(LinearFdm, DefaultDensities)
{
    const auto q = default_force_densities(fixtures::make_x_tensegrity());
    EXPECT_EQ(q, (std::vector<double>{1, 1, 1, 1, -1, -1}));
    Model net = fixtures::make_net(2, 2, {}, 3.0);
    for (double v : default_force_densities(net)) EXPECT_EQ(v, 6.0);
}

TEST(LinearFdm, RejectsWrongLength)
{
    EXPECT_THROW(solve_linear_fdm(fixtures::make_net(3, 3), {1.0}), ModelError);
}
