#include "tensiform/linear_fdm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tensiform/geometry.hpp"

namespace tensiform {

namespace {

constexpr double kMinReciprocalCondition = 1e-12;

void check_densities(const Model& model, const std::vector<double>& q)
{
    if (q.size() != model.members.size()) {
        std::ostringstream s;
        s << "expected " << model.members.size() << " force densities, got " << q.size();
        throw ModelError(s.str());
    }
    for (double v : q)
        if (!std::isfinite(v)) throw ModelError("force densities must be finite");
}

std::string describe(const NullSpaceReport& r)
{
    std::ostringstream s;
    s << "rank " << r.rank << ", nullity " << r.nullity;
    return s.str();
}

}  // namespace

BranchNodeMatrix build_branch_node_matrix(const Model& model)
{
    BranchNodeMatrix c;
    c.entries = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(model.members.size()),
                                      static_cast<Eigen::Index>(model.nodes.size()));
    for (std::size_t j = 0; j < model.members.size(); ++j) {
        c.entries(static_cast<Eigen::Index>(j), model.members[j].endpoints[0]) = 1;
        c.entries(static_cast<Eigen::Index>(j), model.members[j].endpoints[1]) = -1;
    }
    return c;
}

Eigen::MatrixXd assemble_full_D(const Model& model, const std::vector<double>& force_densities)
{
    check_densities(model, force_densities);
    const auto n = static_cast<Eigen::Index>(model.nodes.size());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    // Scatter -(C^T Q C) member by member; each member touches a 2x2 block.
    for (std::size_t j = 0; j < model.members.size(); ++j) {
        const auto [a, b] = model.members[j].endpoints;
        const double q = force_densities[j];
        d(a, a) -= q;
        d(b, b) -= q;
        d(a, b) += q;
        d(b, a) += q;
    }
    return d;
}

DMatrices assemble_D(const Model& model, const std::vector<double>& force_densities)
{
    const Eigen::MatrixXd full = assemble_full_D(model, force_densities);
    DMatrices out;
    for (const auto& node : model.nodes) (node.fixed ? out.fixed_nodes : out.free_nodes).push_back(node.id);

    const auto nf = static_cast<Eigen::Index>(out.free_nodes.size());
    const auto nx = static_cast<Eigen::Index>(out.fixed_nodes.size());
    out.free_free.resize(nf, nf);
    out.free_fixed.resize(nf, nx);
    for (Eigen::Index i = 0; i < nf; ++i) {
        for (Eigen::Index k = 0; k < nf; ++k) out.free_free(i, k) = full(out.free_nodes[i], out.free_nodes[k]);
        for (Eigen::Index k = 0; k < nx; ++k) out.free_fixed(i, k) = full(out.free_nodes[i], out.fixed_nodes[k]);
    }
    return out;
}

NullSpaceReport null_space_analysis(const Eigen::MatrixXd& d, double tol)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(d);
    const Eigen::VectorXd sv = eig.eigenvalues().cwiseAbs();
    const double sigma_max = sv.size() > 0 ? sv.maxCoeff() : 0.0;

    NullSpaceReport report;
    report.tolerance = tol;
    report.singular_values = sv;
    std::vector<Eigen::Index> kernel;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] <= tol * sigma_max) kernel.push_back(i);

    report.nullity = static_cast<int>(kernel.size());
    report.rank = static_cast<int>(sv.size()) - report.nullity;
    report.basis.resize(d.rows(), report.nullity);
    for (int c = 0; c < report.nullity; ++c) report.basis.col(c) = eig.eigenvectors().col(kernel[c]);
    return report;
}

std::vector<double> default_force_densities(const Model& model)
{
    std::vector<double> q;
    q.reserve(model.members.size());
    for (const auto& m : model.members) {
        if (m.role == MemberRole::Strut) {
            q.push_back(-1.0);
            continue;
        }
        const auto* p = std::get_if<PowerLength>(&model.functionals[m.functional]);
        q.push_back(p && p->power == 2 ? 2.0 * p->weight : 1.0);
    }
    return q;
}

LinearSolution solve_linear_fdm(const Model& model, const std::vector<double>& force_densities)
{
    const DMatrices d = assemble_D(model, force_densities);
    if (d.fixed_nodes.empty()) {
        auto report = null_space_analysis(d.free_free);
        throw SingularSystem("no fixed nodes: D x = 0 admits only the trivial solution or a null-space family (" +
                                 describe(report) + ")",
                             std::move(report));
    }
    if (d.free_nodes.empty()) throw ModelError("fully fixed model");

    const auto nf = static_cast<Eigen::Index>(d.free_nodes.size());
    const auto nx = static_cast<Eigen::Index>(d.fixed_nodes.size());
    Eigen::MatrixXd fixed_xyz(nx, 3);
    for (Eigen::Index k = 0; k < nx; ++k) fixed_xyz.row(k) = model.nodes[d.fixed_nodes[k]].position.transpose();
    const Eigen::MatrixXd rhs = -d.free_fixed * fixed_xyz;  // nf x 3

    Eigen::MatrixXd xyz;
    const bool all_positive = std::all_of(force_densities.begin(), force_densities.end(), [](double q) { return q > 0; });
    bool solved = false;
    if (all_positive) {
        // -D is the positive definite Laplacian block here.
        Eigen::LLT<Eigen::MatrixXd> llt(-d.free_free);
        if (llt.info() == Eigen::Success && llt.rcond() > kMinReciprocalCondition) {
            xyz = -llt.solve(rhs);
            solved = true;
        }
    }
    if (!solved) {
        auto report = null_space_analysis(d.free_free);
        if (report.nullity > 0)
            throw SingularSystem("D is singular (" + describe(report) + ")", std::move(report));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(d.free_free);
        const Eigen::VectorXd inv = eig.eigenvalues().cwiseInverse();
        xyz = eig.eigenvectors() * inv.asDiagonal() * (eig.eigenvectors().transpose() * rhs);
    }

    const DofMap dofs = build_dof_map(model);
    LinearSolution out;
    out.coords.resize(dofs.size());
    for (Eigen::Index i = 0; i < nf; ++i) out.coords.segment<3>(dofs.node_offset[d.free_nodes[i]]) = xyz.row(i).transpose();

    const auto pos = node_positions(model, dofs, out.coords);
    for (std::size_t j = 0; j < model.members.size(); ++j) {
        const auto [a, b] = model.members[j].endpoints;
        const double length = member_length(pos[a], pos[b]);
        out.lengths.push_back(length);
        out.tensions.push_back(force_densities[j] * length);
    }
    return out;
}

}  // namespace tensiform
