#include "tensiform/fixtures.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace tensiform::fixtures {

namespace {

int add_node(Model& m, const Vec3& p, bool fixed = false)
{
    const int id = static_cast<int>(m.nodes.size());
    m.nodes.push_back({id, p, fixed});
    return id;
}

int add_functional(Model& m, ElementFunctional f)
{
    m.functionals.push_back(f);
    return static_cast<int>(m.functionals.size()) - 1;
}

void add_cable(Model& m, int a, int b, int functional)
{
    const int id = static_cast<int>(m.members.size());
    m.members.push_back({id, {a, b}, MemberRole::Cable, functional, 0.0});
}

void add_strut(Model& m, int a, int b, double length)
{
    const int id = static_cast<int>(m.members.size());
    m.members.push_back({id, {a, b}, MemberRole::Strut, -1, length});
}

void add_triangle(Model& m, int a, int b, int c, int functional)
{
    const int id = static_cast<int>(m.elements.size());
    m.elements.push_back({id, {a, b, c}, functional});
}

}  // namespace

Model make_x_tensegrity(const std::array<double, 4>& weights, const std::array<double, 2>& strut_lengths, int power)
{
    Model m;
    add_node(m, {-0.5 * strut_lengths[0], 0, 0});
    add_node(m, {0.5 * strut_lengths[0], 0, 0});
    add_node(m, {0, -0.5 * strut_lengths[1], 0});
    add_node(m, {0, 0.5 * strut_lengths[1], 0});
    const std::array<std::array<int, 2>, 4> cables{{{0, 2}, {0, 3}, {1, 2}, {1, 3}}};
    for (int j = 0; j < 4; ++j) add_cable(m, cables[j][0], cables[j][1], add_functional(m, PowerLength{weights[j], power}));
    add_strut(m, 0, 1, strut_lengths[0]);
    add_strut(m, 2, 3, strut_lengths[1]);
    return m;
}

Model make_simplex(double strut_length, double weight, int power)
{
    Model m;
    const double r = 0.5 * strut_length;
    const double h = 0.7 * strut_length;
    for (int level = 0; level < 2; ++level) {
        for (int i = 0; i < 3; ++i) {
            const double t = 2.0 * std::numbers::pi * i / 3.0 + level * std::numbers::pi / 3.0;
            add_node(m, {r * std::cos(t), r * std::sin(t), level * h});
        }
    }
    const int f = add_functional(m, PowerLength{weight, power});
    for (int level = 0; level < 2; ++level)
        for (int i = 0; i < 3; ++i) add_cable(m, 3 * level + i, 3 * level + (i + 1) % 3, f);
    for (int i = 0; i < 3; ++i) add_cable(m, i, 3 + i, f);
    for (int i = 0; i < 3; ++i) add_strut(m, i, 3 + (i + 1) % 3, strut_length);
    return m;
}

Model make_strut20(int connection, double w1, double w2, double strut_length, int power)
{
    if (connection < 1 || connection > 9) throw std::invalid_argument("connection index must be in 1..9");
    constexpr int kNodes = 40;
    Model m;
    const double radius = 0.5 * strut_length;
    for (int s = 0; s < kNodes / 2; ++s) {
        const double t = 2.0 * std::numbers::pi * s / (kNodes / 2);
        const Vec3 c(radius * std::cos(t), radius * std::sin(t), 0.0);
        add_node(m, c + Vec3(0, 0, -0.5 * strut_length));
        add_node(m, c + Vec3(0, 0, 0.5 * strut_length));
    }
    const int f1 = add_functional(m, PowerLength{w1, power});
    const int f2 = add_functional(m, PowerLength{w2, power});
    for (int j = 0; j < kNodes; ++j) add_cable(m, j, (j + 2 * connection) % kNodes, f1);
    for (int j = 0; j < kNodes; ++j) add_cable(m, j, (j + 2 * connection + 1) % kNodes, f2);
    for (int s = 0; s < kNodes / 2; ++s) add_strut(m, 2 * s, 2 * s + 1, strut_length);
    return m;
}

Model make_cuboctahedron_membrane(double cable_weight, double membrane_weight, double strut_length)
{
    constexpr int kSegments = 8;
    Model m;
    const int fc = add_functional(m, PowerLength{cable_weight, 4});
    const int fm = add_functional(m, PowerArea{membrane_weight, 2});
    const double s = 0.5 * strut_length;  // square diagonal == strut length

    std::map<std::array<int, 3>, int> vertex_ids;
    auto vertex = [&](const std::array<int, 3>& key) {
        auto it = vertex_ids.find(key);
        if (it != vertex_ids.end()) return it->second;
        const int id = add_node(m, s * Vec3(key[0], key[1], key[2]));
        vertex_ids.emplace(key, id);
        return id;
    };

    std::vector<std::array<int, 2>> struts;
    for (int axis = 0; axis < 3; ++axis) {
        for (int sign : {1, -1}) {
            const int u = (axis + 1) % 3;
            const int v = (axis + 2) % 3;
            std::array<std::array<int, 3>, 4> corner_keys{};
            for (auto& k : corner_keys) k = {0, 0, 0};
            for (auto& k : corner_keys) k[axis] = sign;
            corner_keys[0][u] = 1;
            corner_keys[1][v] = 1;
            corner_keys[2][u] = -1;
            corner_keys[3][v] = -1;
            std::array<int, 4> corners{};
            for (int c = 0; c < 4; ++c) corners[c] = vertex(corner_keys[c]);

            const Vec3 c0 = m.nodes[corners[0]].position;
            const Vec3 du = (m.nodes[corners[1]].position - c0) / kSegments;
            const Vec3 dv = (m.nodes[corners[3]].position - c0) / kSegments;
            std::vector<int> grid((kSegments + 1) * (kSegments + 1));
            auto at = [&](int i, int j) -> int& { return grid[i * (kSegments + 1) + j]; };
            for (int i = 0; i <= kSegments; ++i) {
                for (int j = 0; j <= kSegments; ++j) {
                    if (i == 0 && j == 0) at(i, j) = corners[0];
                    else if (i == kSegments && j == 0) at(i, j) = corners[1];
                    else if (i == kSegments && j == kSegments) at(i, j) = corners[2];
                    else if (i == 0 && j == kSegments) at(i, j) = corners[3];
                    else at(i, j) = add_node(m, c0 + i * du + j * dv);
                }
            }
            for (int k = 0; k < kSegments; ++k) {
                add_cable(m, at(k, 0), at(k + 1, 0), fc);
                add_cable(m, at(kSegments, k), at(kSegments, k + 1), fc);
                add_cable(m, at(kSegments - k, kSegments), at(kSegments - k - 1, kSegments), fc);
                add_cable(m, at(0, kSegments - k), at(0, kSegments - k - 1), fc);
            }
            for (int i = 0; i < kSegments; ++i) {
                for (int j = 0; j < kSegments; ++j) {
                    if ((i + j) % 2 == 0) {
                        add_triangle(m, at(i, j), at(i + 1, j), at(i + 1, j + 1), fm);
                        add_triangle(m, at(i, j), at(i + 1, j + 1), at(i, j + 1), fm);
                    } else {
                        add_triangle(m, at(i, j), at(i + 1, j), at(i, j + 1), fm);
                        add_triangle(m, at(i + 1, j), at(i + 1, j + 1), at(i, j + 1), fm);
                    }
                }
            }
            struts.push_back({corners[0], corners[2]});
        }
    }
    for (const auto& st : struts) add_strut(m, st[0], st[1], strut_length);
    return m;
}

Model make_ring_membrane(double separation, int axial, int hoop, double radius, ElementFunctional membrane)
{
    if (!(separation > 0.0)) throw std::invalid_argument("ring separation must be positive");
    if (axial < 1 || hoop < 3) throw std::invalid_argument("ring membrane needs axial >= 1 and hoop >= 3");
    Model m;
    const int f = add_functional(m, membrane);
    for (int i = 0; i <= axial; ++i) {
        const double z = -0.5 * separation + separation * i / axial;
        const bool boundary = i == 0 || i == axial;
        for (int k = 0; k < hoop; ++k) {
            const double t = 2.0 * std::numbers::pi * k / hoop;
            add_node(m, {radius * std::cos(t), radius * std::sin(t), z}, boundary);
        }
    }
    auto id = [&](int i, int k) { return i * hoop + (k % hoop); };
    for (int i = 0; i < axial; ++i) {
        for (int k = 0; k < hoop; ++k) {
            if ((i + k) % 2 == 0) {
                add_triangle(m, id(i, k), id(i, k + 1), id(i + 1, k + 1), f);
                add_triangle(m, id(i, k), id(i + 1, k + 1), id(i + 1, k), f);
            } else {
                add_triangle(m, id(i, k), id(i, k + 1), id(i + 1, k), f);
                add_triangle(m, id(i, k + 1), id(i + 1, k + 1), id(i + 1, k), f);
            }
        }
    }
    return m;
}

Model make_net(int rows, int cols, std::vector<int> fixed_nodes, double weight)
{
    if (rows < 2 || cols < 2) throw std::invalid_argument("net needs at least 2 x 2 nodes");
    Model m;
    const double lift = 0.25 * std::max(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) add_node(m, {static_cast<double>(c), static_cast<double>(r), 0.0});

    if (fixed_nodes.empty()) {
        const std::array<int, 4> corners{0, cols - 1, (rows - 1) * cols + cols - 1, (rows - 1) * cols};
        for (int k = 0; k < 4; ++k) {
            m.nodes[corners[k]].fixed = true;
            m.nodes[corners[k]].position.z() = (k % 2 == 0) ? lift : -lift;
        }
    } else {
        for (int id : fixed_nodes) {
            if (id < 0 || id >= rows * cols) throw std::invalid_argument("fixed node outside the net");
            m.nodes[id].fixed = true;
        }
    }

    const int f = add_functional(m, PowerLength{weight, 2});
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c + 1 < cols; ++c) add_cable(m, r * cols + c, r * cols + c + 1, f);
    for (int r = 0; r + 1 < rows; ++r)
        for (int c = 0; c < cols; ++c) add_cable(m, r * cols + c, (r + 1) * cols + c, f);
    return m;
}

}  // namespace tensiform::fixtures
