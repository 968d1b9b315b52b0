#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace tensiform {

using Vec3 = Eigen::Vector3d;

/// Flat vector of free-node coordinates, ordered by the model's DofMap.
using Coordinates = Eigen::VectorXd;

// Element functionals ------------------------------------------------------

/// w * L^p
struct PowerLength {
    double weight = 1.0;
    int power = 2;
};

/// 0.5 * k * (L - rest)^2
struct SpringLength {
    double stiffness = 1.0;
    double rest_length = 0.0;
};

/// w * S^p
struct PowerArea {
    double weight = 1.0;
    int power = 2;
};

/// S (minimal surface)
struct PlainArea {};

using ElementFunctional = std::variant<PowerLength, SpringLength, PowerArea, PlainArea>;

constexpr int kMaxFunctionalPower = 8;

bool is_length_functional(const ElementFunctional& f);
bool is_area_functional(const ElementFunctional& f);
std::string functional_name(const ElementFunctional& f);

// Structural entities ------------------------------------------------------

struct Node {
    int id = 0;
    Vec3 position = Vec3::Zero();
    bool fixed = false;
};

enum class MemberRole { Cable, Strut };

struct LinearMember {
    int id = 0;
    std::array<int, 2> endpoints{0, 0};
    MemberRole role = MemberRole::Cable;
    int functional = -1;             // cables only
    double prescribed_length = 0.0;  // struts only
};

struct TriElement {
    int id = 0;
    std::array<int, 3> vertices{0, 0, 0};
    int functional = -1;
};

struct Model {
    std::vector<Node> nodes;
    std::vector<ElementFunctional> functionals;
    std::vector<LinearMember> members;
    std::vector<TriElement> elements;

    std::size_t cable_count() const;
    std::size_t strut_count() const;
    /// Member ids of all struts, in member order.
    std::vector<int> strut_ids() const;
    /// Member ids of all cables, in member order.
    std::vector<int> cable_ids() const;
};

/// Maps each free node to the offset of its x coordinate in the unknown vector.
/// Fixed nodes map to -1 and never appear in Coordinates.
struct DofMap {
    std::vector<int> node_offset;
    std::vector<int> free_nodes;  // node ids in increasing order

    int size() const { return static_cast<int>(free_nodes.size()) * 3; }
    bool is_free(int node) const { return node_offset[node] >= 0; }
    int index(int node, int axis) const { return node_offset[node] + axis; }
    /// Inverse map: unknown index -> (node id, axis)
    std::pair<int, int> coordinate(int index) const { return {free_nodes[index / 3], index % 3}; }
};

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws ModelError("fully fixed model") when no node is free.
DofMap build_dof_map(const Model& model);

/// One message per violated invariant; empty when the model is well formed.
std::vector<std::string> validate(const Model& model);

/// Free coordinates taken from the node positions stored in the model.
Coordinates model_coordinates(const Model& model, const DofMap& dofs);

/// Full node positions: fixed nodes from the model, free nodes from coords.
std::vector<Vec3> node_positions(const Model& model, const DofMap& dofs, const Coordinates& coords);

/// Copy of the model with free node positions replaced by coords.
Model with_coordinates(const Model& model, const DofMap& dofs, const Coordinates& coords);

}  // namespace tensiform
