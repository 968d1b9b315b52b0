#pragma once

#include <vector>

#include "tensiform/geometry.hpp"
#include "tensiform/model.hpp"

namespace tensiform {

/// Generalized forces conjugate to the element measures.
///  - member_forces[j]   n_j = d(pi_j)/dL_j for cables, 0 for struts
///  - element_stresses[k] sigma_k = d(pi_k)/dS_k
///  - strut_multipliers[i] lambda of the i-th strut (Model::strut_ids order)
struct GeneralizedForces {
    std::vector<double> member_forces;
    std::vector<double> element_stresses;
    std::vector<double> strut_multipliers;
};

double element_energy(const ElementFunctional& f, double measure);
double element_force(const ElementFunctional& f, double measure);

/// Sum of cable and triangle energies. Strut constraint terms are not included.
double total_energy(const Model& model, const DofMap& dofs, const Coordinates& coords);

struct GradientResult {
    Eigen::VectorXd gradient;
    GeneralizedForces forces;  // strut_multipliers left empty
};

/// Gradient of total_energy over the free coordinates, plus the n_j and sigma_k used.
/// Throws DegenerateGeometry naming the member or element when a gradient is undefined.
GradientResult total_gradient(const Model& model, const DofMap& dofs, const Coordinates& coords);

/// Rows are dL_k/dx for each strut (Model::strut_ids order), fixed components dropped.
Eigen::MatrixXd strut_jacobian(const Model& model, const DofMap& dofs, const std::vector<Vec3>& positions);

/// Adds scale * grad(L_member) into the free-coordinate vector.
void accumulate_length_gradient(Eigen::VectorXd& out, const DofMap& dofs, const LinearMember& member,
                                const std::vector<Vec3>& positions, double scale);

/// Adds scale * grad(S_element) into the free-coordinate vector.
void accumulate_area_gradient(Eigen::VectorXd& out, const DofMap& dofs, const TriElement& element,
                              const std::vector<Vec3>& positions, double scale);

/// Sum of cable lengths and sum of triangle areas at the given node positions.
double total_cable_length(const Model& model, const std::vector<Vec3>& positions);
double total_area(const Model& model, const std::vector<Vec3>& positions);

}  // namespace tensiform
