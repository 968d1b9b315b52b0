#pragma once

#include <array>
#include <vector>

#include "tensiform/model.hpp"

namespace tensiform::fixtures {

/// Planar X-Tensegrity: 4 free nodes, cables 0-2, 0-3, 1-2, 1-3 with
/// PowerLength(w_i, power), struts 0-1 and 2-3. Nodes start on the square
/// whose diagonals are the struts.
Model make_x_tensegrity(const std::array<double, 4>& weights = {1, 1, 1, 1},
                        const std::array<double, 2>& strut_lengths = {1, 1}, int power = 4);

/// Simplex tensegrity: 6 nodes, 9 cables (two triangles and three verticals), 3 struts.
Model make_simplex(double strut_length = 10.0, double weight = 1.0, int power = 4);

/// 20 struts, 80 cables. Strut i joins nodes 2i and 2i+1; connection c in 1..9
/// links node j to j+2c (group w1, cables 0..39) and to j+2c+1 (group w2,
/// cables 40..79), indices mod 40.
Model make_strut20(int connection, double w1 = 1.0, double w2 = 2.0, double strut_length = 10.0, int power = 4);

/// Cuboctahedron membrane tensegrity: 24 edge curves of 8 cable segments,
/// 6 square membranes of 128 triangles, and one strut across a diagonal of
/// every square. Cables use w*L^4, triangles w*S^2.
Model make_cuboctahedron_membrane(double cable_weight = 2.0, double membrane_weight = 1.0,
                                  double strut_length = 10.0);

/// Open cylinder between two fixed coaxial rings `separation` apart, with
/// `axial` divisions along the axis and `hoop` around it.
Model make_ring_membrane(double separation, int axial = 12, int hoop = 32, double radius = 5.0,
                         ElementFunctional membrane = PowerArea{1.0, 2});

/// rows x cols grid of nodes joined by w*L^2 cables along grid lines. With
/// no fixed list, the four corners are fixed at alternating heights.
Model make_net(int rows, int cols, std::vector<int> fixed_nodes = {}, double weight = 1.0);

}  // namespace tensiform::fixtures
