#include "tensiform/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "tensiform/detail/parallel.hpp"
#include "tensiform/geometry.hpp"

namespace tensiform {

namespace {

double mean_abs_force(const Model& model, const GeneralizedForces& forces)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& m : model.members) {
        if (m.role != MemberRole::Cable) continue;
        sum += std::abs(forces.member_forces[m.id]);
        ++count;
    }
    for (double s : forces.element_stresses) {
        sum += std::abs(s);
        ++count;
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

Model substitute(const Model& model, const ElementFunctional& f)
{
    Model out = model;
    out.functionals.push_back(f);
    const int id = static_cast<int>(out.functionals.size()) - 1;
    if (is_length_functional(f)) {
        for (auto& m : out.members)
            if (m.role == MemberRole::Cable) m.functional = id;
    } else {
        for (auto& e : out.elements) e.functional = id;
    }
    return out;
}

}  // namespace

EquilibriumReport equilibrium_residual(const Model& model, const DofMap& dofs, const Coordinates& coords,
                                       const GeneralizedForces& forces)
{
    const auto pos = node_positions(model, dofs, coords);
    const auto struts = model.strut_ids();
    const bool with_struts = !forces.strut_multipliers.empty();
    if (with_struts && forces.strut_multipliers.size() != struts.size())
        throw std::invalid_argument("strut multiplier count does not match the model");

    EquilibriumReport r;
    r.residual = Eigen::VectorXd::Zero(dofs.size());
    r.member_forces.assign(model.members.size(), 0.0);
    r.force_densities.assign(model.members.size(), 0.0);
    r.strut_multipliers = forces.strut_multipliers;

    for (const auto& m : model.members)
        if (m.role == MemberRole::Cable) r.member_forces[m.id] = forces.member_forces[m.id];
    if (with_struts)
        for (std::size_t i = 0; i < struts.size(); ++i) r.member_forces[struts[i]] = forces.strut_multipliers[i];

    // Same accumulation order as total_gradient, then the strut terms.
    for (const auto& m : model.members)
        if (m.role == MemberRole::Cable) accumulate_length_gradient(r.residual, dofs, m, pos, r.member_forces[m.id]);
    for (const auto& e : model.elements) accumulate_area_gradient(r.residual, dofs, e, pos, forces.element_stresses[e.id]);
    if (with_struts)
        for (std::size_t i = 0; i < struts.size(); ++i)
            accumulate_length_gradient(r.residual, dofs, model.members[struts[i]], pos, forces.strut_multipliers[i]);

    for (const auto& m : model.members) {
        const double length = member_length(pos[m.endpoints[0]], pos[m.endpoints[1]]);
        r.force_densities[m.id] = r.member_forces[m.id] / length;
    }
    for (int node : dofs.free_nodes) r.node_residuals.push_back(r.residual.segment<3>(dofs.node_offset[node]));
    r.inf_norm = r.residual.size() ? r.residual.cwiseAbs().maxCoeff() : 0.0;
    r.relative_norm = r.inf_norm / std::max(mean_abs_force(model, forces), std::numeric_limits<double>::min());
    return r;
}

std::vector<ExtendedDensity> extended_force_densities(const Model& model, const DofMap& dofs,
                                                      const Coordinates& coords, const GeneralizedForces& forces)
{
    const auto pos = node_positions(model, dofs, coords);
    std::vector<ExtendedDensity> out;
    for (const auto& m : model.members) {
        if (m.role != MemberRole::Cable) continue;
        const double length = member_length(pos[m.endpoints[0]], pos[m.endpoints[1]]);
        if (!(length > kLengthEpsilon))
            throw DegenerateGeometry(DegenerateGeometry::Kind::Member, m.id,
                                     "member " + std::to_string(m.id) + " has zero length");
        const double n = forces.member_forces[m.id];
        out.push_back({m.id, length, n, n / length, n / (2.0 * length), n / (4.0 * length * length * length)});
    }
    return out;
}

double virtual_work(const Model& model, const DofMap& dofs, const Coordinates& coords,
                    const GeneralizedForces& forces, const Eigen::VectorXd& variation)
{
    const auto pos = node_positions(model, dofs, coords);
    const auto struts = model.strut_ids();
    Eigen::VectorXd g(dofs.size());
    double work = 0.0;
    for (const auto& m : model.members) {
        if (m.role != MemberRole::Cable) continue;
        g.setZero();
        accumulate_length_gradient(g, dofs, m, pos, 1.0);
        work += forces.member_forces[m.id] * g.dot(variation);
    }
    for (const auto& e : model.elements) {
        g.setZero();
        accumulate_area_gradient(g, dofs, e, pos, 1.0);
        work += forces.element_stresses[e.id] * g.dot(variation);
    }
    for (std::size_t i = 0; i < forces.strut_multipliers.size() && i < struts.size(); ++i) {
        g.setZero();
        accumulate_length_gradient(g, dofs, model.members[struts[i]], pos, 1.0);
        work += forces.strut_multipliers[i] * g.dot(variation);
    }
    return work;
}

double virtual_work_check(const Model& model, const DofMap& dofs, const Coordinates& coords,
                          const GeneralizedForces& forces, std::uint64_t seed, int samples)
{
    const auto pos = node_positions(model, dofs, coords);
    const Eigen::MatrixXd jac = strut_jacobian(model, dofs, pos);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    if (jac.rows() > 0) cod.compute(jac.transpose());

    double force_norm2 = 0.0;
    for (const auto& m : model.members)
        if (m.role == MemberRole::Cable) force_norm2 += forces.member_forces[m.id] * forces.member_forces[m.id];
    for (double s : forces.element_stresses) force_norm2 += s * s;
    for (double l : forces.strut_multipliers) force_norm2 += l * l;
    const double force_norm = std::sqrt(force_norm2);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd dx(dofs.size());
        for (Eigen::Index i = 0; i < dx.size(); ++i) dx[i] = normal(rng);
        if (jac.rows() > 0) dx -= jac.transpose() * cod.solve(dx);
        const double dx_norm = dx.norm();
        if (dx_norm == 0.0 || force_norm == 0.0) continue;
        const double dw = virtual_work(model, dofs, coords, forces, dx);
        worst = std::max(worst, std::abs(dw) / (force_norm * dx_norm));
    }
    return worst;
}

MeasureStats measure_stats(const std::vector<double>& values, int bins)
{
    MeasureStats s;
    s.histogram.assign(static_cast<std::size_t>(std::max(bins, 1)), 0);
    if (values.empty()) return s;
    const auto n = static_cast<double>(values.size());
    for (double v : values) s.total += v;
    s.mean = s.total / n;
    double var = 0.0;
    for (double v : values) var += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(var / n);
    s.coefficient_of_variation = s.mean != 0.0 ? s.stddev / std::abs(s.mean) : 0.0;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;
    const double width = s.max - s.min;
    for (double v : values) {
        auto bin = width > 0.0 ? static_cast<std::size_t>((v - s.min) / width * static_cast<double>(s.histogram.size())) : 0;
        bin = std::min(bin, s.histogram.size() - 1);
        ++s.histogram[bin];
    }
    return s;
}

std::vector<ComparisonRow> compare_functionals(const Model& model, const std::vector<ElementFunctional>& functionals,
                                               const SolveOptions& options)
{
    std::vector<ComparisonRow> rows(functionals.size());
    detail::parallel_for(functionals.size(), [&](std::size_t i) {
        ComparisonRow& row = rows[i];
        row.label = functional_name(functionals[i]);
        try {
            const Model variant = substitute(model, functionals[i]);
            const auto violations = validate(variant);
            if (!violations.empty()) throw ModelError(violations.front());
            const DofMap dofs = build_dof_map(variant);
            const ConvergedState state = minimize_constrained(variant, options);
            const auto pos = node_positions(variant, dofs, state.coords);

            std::vector<double> measures;
            if (is_area_functional(functionals[i])) {
                for (const auto& e : variant.elements)
                    measures.push_back(triangle_area(pos[e.vertices[0]], pos[e.vertices[1]], pos[e.vertices[2]]));
            } else {
                for (const auto& m : variant.members)
                    if (m.role == MemberRole::Cable)
                        measures.push_back(member_length(pos[m.endpoints[0]], pos[m.endpoints[1]]));
            }
            row.measure = measure_stats(measures);
            row.converged = state.converged;
            row.iterations = state.iterations;
            row.energy = state.energy;
            row.residual_norm = state.residual_norm;
            row.total_length = total_cable_length(variant, pos);
            row.total_area = total_area(variant, pos);
            row.coords = state.coords;
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return rows;
}

}  // namespace tensiform
