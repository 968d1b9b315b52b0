#include "tensiform/model.hpp"

#include "tensiform/detail/overloaded.hpp"

#include <cmath>
#include <sstream>

namespace tensiform {

using detail::overloaded;

namespace {

bool finite(double v) { return std::isfinite(v); }

std::string check_functional(const ElementFunctional& f)
{
    return std::visit(
        overloaded{
            [](const PowerLength& p) -> std::string {
                if (!finite(p.weight) || p.weight <= 0.0) return "weight must be positive";
                if (p.power < 1 || p.power > kMaxFunctionalPower) return "power must be in 1..8";
                return {};
            },
            [](const SpringLength& s) -> std::string {
                if (!finite(s.stiffness) || s.stiffness <= 0.0) return "stiffness must be positive";
                if (!finite(s.rest_length) || s.rest_length < 0.0) return "rest length must be >= 0";
                return {};
            },
            [](const PowerArea& p) -> std::string {
                if (!finite(p.weight) || p.weight <= 0.0) return "weight must be positive";
                if (p.power < 1 || p.power > kMaxFunctionalPower) return "power must be in 1..8";
                return {};
            },
            [](const PlainArea&) -> std::string { return {}; },
        },
        f);
}

}  // namespace

bool is_length_functional(const ElementFunctional& f)
{
    return std::holds_alternative<PowerLength>(f) || std::holds_alternative<SpringLength>(f);
}

bool is_area_functional(const ElementFunctional& f)
{
    return std::holds_alternative<PowerArea>(f) || std::holds_alternative<PlainArea>(f);
}

std::string functional_name(const ElementFunctional& f)
{
    return std::visit(overloaded{
                          [](const PowerLength& p) { return "sum w*L^" + std::to_string(p.power); },
                          [](const SpringLength&) { return std::string("sum k/2*(L-L0)^2"); },
                          [](const PowerArea& p) { return "sum w*S^" + std::to_string(p.power); },
                          [](const PlainArea&) { return std::string("sum S"); },
                      },
                      f);
}

std::size_t Model::cable_count() const
{
    std::size_t n = 0;
    for (const auto& m : members)
        if (m.role == MemberRole::Cable) ++n;
    return n;
}

std::size_t Model::strut_count() const { return members.size() - cable_count(); }

std::vector<int> Model::strut_ids() const
{
    std::vector<int> ids;
    for (const auto& m : members)
        if (m.role == MemberRole::Strut) ids.push_back(m.id);
    return ids;
}

std::vector<int> Model::cable_ids() const
{
    std::vector<int> ids;
    for (const auto& m : members)
        if (m.role == MemberRole::Cable) ids.push_back(m.id);
    return ids;
}

DofMap build_dof_map(const Model& model)
{
    DofMap map;
    map.node_offset.assign(model.nodes.size(), -1);
    int next = 0;
    for (std::size_t i = 0; i < model.nodes.size(); ++i) {
        if (model.nodes[i].fixed) continue;
        map.node_offset[i] = next;
        map.free_nodes.push_back(static_cast<int>(i));
        next += 3;
    }
    if (map.free_nodes.empty()) throw ModelError("fully fixed model");
    return map;
}

std::vector<std::string> validate(const Model& model)
{
    std::vector<std::string> out;
    const int n_nodes = static_cast<int>(model.nodes.size());
    auto valid_node = [&](int id) { return id >= 0 && id < n_nodes; };

    bool any_free = false;
    for (int i = 0; i < n_nodes; ++i) {
        const auto& node = model.nodes[i];
        if (node.id != i) {
            std::ostringstream s;
            s << "node at index " << i << " has id " << node.id << " (ids must be dense from 0)";
            out.push_back(s.str());
        }
        if (!node.position.allFinite()) out.push_back("node " + std::to_string(node.id) + ": non-finite position");
        any_free = any_free || !node.fixed;
    }
    if (!any_free) out.push_back("model has no free node");

    for (std::size_t i = 0; i < model.functionals.size(); ++i) {
        const auto msg = check_functional(model.functionals[i]);
        if (!msg.empty()) out.push_back("functional " + std::to_string(i) + ": " + msg);
    }
    const int n_func = static_cast<int>(model.functionals.size());

    for (std::size_t i = 0; i < model.members.size(); ++i) {
        const auto& m = model.members[i];
        const std::string tag = "member " + std::to_string(m.id);
        if (m.id != static_cast<int>(i)) out.push_back(tag + ": ids must be dense from 0");
        const auto [a, b] = m.endpoints;
        if (!valid_node(a) || !valid_node(b)) {
            out.push_back(tag + ": endpoint references unknown node");
        } else if (a == b) {
            out.push_back(tag + ": endpoints are identical");
        }
        if (m.role == MemberRole::Strut) {
            if (!finite(m.prescribed_length) || m.prescribed_length <= 0.0)
                out.push_back(tag + ": strut prescribed length must be positive");
        } else if (m.functional < 0 || m.functional >= n_func) {
            out.push_back(tag + ": cable references unknown functional");
        } else if (!is_length_functional(model.functionals[m.functional])) {
            out.push_back(tag + ": cable functional must be a length functional");
        }
    }

    for (std::size_t i = 0; i < model.elements.size(); ++i) {
        const auto& e = model.elements[i];
        const std::string tag = "element " + std::to_string(e.id);
        if (e.id != static_cast<int>(i)) out.push_back(tag + ": ids must be dense from 0");
        const auto [a, b, c] = e.vertices;
        if (!valid_node(a) || !valid_node(b) || !valid_node(c)) {
            out.push_back(tag + ": vertex references unknown node");
        } else if (a == b || b == c || a == c) {
            out.push_back(tag + ": vertices must be pairwise distinct");
        }
        if (e.functional < 0 || e.functional >= n_func) {
            out.push_back(tag + ": references unknown functional");
        } else if (!is_area_functional(model.functionals[e.functional])) {
            out.push_back(tag + ": element functional must be an area functional");
        }
    }
    return out;
}

Coordinates model_coordinates(const Model& model, const DofMap& dofs)
{
    Coordinates x(dofs.size());
    for (int node : dofs.free_nodes) x.segment<3>(dofs.node_offset[node]) = model.nodes[node].position;
    return x;
}

std::vector<Vec3> node_positions(const Model& model, const DofMap& dofs, const Coordinates& coords)
{
    std::vector<Vec3> pos(model.nodes.size());
    for (std::size_t i = 0; i < model.nodes.size(); ++i) {
        const int off = dofs.node_offset[i];
        pos[i] = off >= 0 ? Vec3(coords.segment<3>(off)) : model.nodes[i].position;
    }
    return pos;
}

Model with_coordinates(const Model& model, const DofMap& dofs, const Coordinates& coords)
{
    Model out = model;
    for (int node : dofs.free_nodes) out.nodes[node].position = coords.segment<3>(dofs.node_offset[node]);
    return out;
}

}  // namespace tensiform
