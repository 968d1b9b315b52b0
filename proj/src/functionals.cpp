#include "tensiform/functionals.hpp"

#include <cmath>
#include <string>

#include "tensiform/detail/overloaded.hpp"

namespace tensiform {

using detail::overloaded;

namespace {

double int_pow(double x, int p)
{
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
}

void scatter(Eigen::VectorXd& out, const DofMap& dofs, int node, const Vec3& v)
{
    const int off = dofs.node_offset[node];
    if (off >= 0) out.segment<3>(off) += v;
}

}  // namespace

double element_energy(const ElementFunctional& f, double measure)
{
    return std::visit(overloaded{
                          [&](const PowerLength& p) { return p.weight * int_pow(measure, p.power); },
                          [&](const SpringLength& s) {
                              const double d = measure - s.rest_length;
                              return 0.5 * s.stiffness * d * d;
                          },
                          [&](const PowerArea& p) { return p.weight * int_pow(measure, p.power); },
                          [&](const PlainArea&) { return measure; },
                      },
                      f);
}

double element_force(const ElementFunctional& f, double measure)
{
    return std::visit(overloaded{
                          [&](const PowerLength& p) { return p.power * p.weight * int_pow(measure, p.power - 1); },
                          [&](const SpringLength& s) { return s.stiffness * (measure - s.rest_length); },
                          [&](const PowerArea& p) { return p.power * p.weight * int_pow(measure, p.power - 1); },
                          [&](const PlainArea&) { return 1.0; },
                      },
                      f);
}

double total_energy(const Model& model, const DofMap& dofs, const Coordinates& coords)
{
    const auto pos = node_positions(model, dofs, coords);
    double energy = 0.0;
    for (const auto& m : model.members) {
        if (m.role != MemberRole::Cable) continue;
        const double length = member_length(pos[m.endpoints[0]], pos[m.endpoints[1]]);
        energy += element_energy(model.functionals[m.functional], length);
    }
    for (const auto& e : model.elements) {
        const double area = triangle_area(pos[e.vertices[0]], pos[e.vertices[1]], pos[e.vertices[2]]);
        energy += element_energy(model.functionals[e.functional], area);
    }
    return energy;
}

void accumulate_length_gradient(Eigen::VectorXd& out, const DofMap& dofs, const LinearMember& member,
                                const std::vector<Vec3>& positions, double scale)
{
    const auto [a, b] = member.endpoints;
    LengthGradient g;
    try {
        g = member_length_gradient(positions[a], positions[b]);
    } catch (const DegenerateGeometry&) {
        throw DegenerateGeometry(DegenerateGeometry::Kind::Member, member.id,
                                 "member " + std::to_string(member.id) + " has zero length");
    }
    scatter(out, dofs, a, scale * g.at_p);
    scatter(out, dofs, b, scale * g.at_q);
}

void accumulate_area_gradient(Eigen::VectorXd& out, const DofMap& dofs, const TriElement& element,
                              const std::vector<Vec3>& positions, double scale)
{
    const auto [a, b, c] = element.vertices;
    AreaGradient g;
    try {
        g = triangle_area_gradient(positions[a], positions[b], positions[c]);
    } catch (const DegenerateGeometry&) {
        throw DegenerateGeometry(DegenerateGeometry::Kind::Element, element.id,
                                 "element " + std::to_string(element.id) + " has zero area");
    }
    scatter(out, dofs, a, scale * g.at_p);
    scatter(out, dofs, b, scale * g.at_q);
    scatter(out, dofs, c, scale * g.at_r);
}

GradientResult total_gradient(const Model& model, const DofMap& dofs, const Coordinates& coords)
{
    const auto pos = node_positions(model, dofs, coords);
    GradientResult out;
    out.gradient = Eigen::VectorXd::Zero(dofs.size());
    out.forces.member_forces.assign(model.members.size(), 0.0);
    out.forces.element_stresses.assign(model.elements.size(), 0.0);

    for (const auto& m : model.members) {
        if (m.role != MemberRole::Cable) continue;
        const double length = member_length(pos[m.endpoints[0]], pos[m.endpoints[1]]);
        const double n = element_force(model.functionals[m.functional], length);
        out.forces.member_forces[m.id] = n;
        accumulate_length_gradient(out.gradient, dofs, m, pos, n);
    }
    for (const auto& e : model.elements) {
        const double area = triangle_area(pos[e.vertices[0]], pos[e.vertices[1]], pos[e.vertices[2]]);
        const double sigma = element_force(model.functionals[e.functional], area);
        out.forces.element_stresses[e.id] = sigma;
        accumulate_area_gradient(out.gradient, dofs, e, pos, sigma);
    }
    return out;
}

Eigen::MatrixXd strut_jacobian(const Model& model, const DofMap& dofs, const std::vector<Vec3>& positions)
{
    const auto struts = model.strut_ids();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(struts.size()), dofs.size());
    Eigen::VectorXd row(dofs.size());
    for (std::size_t i = 0; i < struts.size(); ++i) {
        row.setZero();
        accumulate_length_gradient(row, dofs, model.members[struts[i]], positions, 1.0);
        jac.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return jac;
}

double total_cable_length(const Model& model, const std::vector<Vec3>& positions)
{
    double sum = 0.0;
    for (const auto& m : model.members)
        if (m.role == MemberRole::Cable) sum += member_length(positions[m.endpoints[0]], positions[m.endpoints[1]]);
    return sum;
}

double total_area(const Model& model, const std::vector<Vec3>& positions)
{
    double sum = 0.0;
    for (const auto& e : model.elements)
        sum += triangle_area(positions[e.vertices[0]], positions[e.vertices[1]], positions[e.vertices[2]]);
    return sum;
}

}  // namespace tensiform
