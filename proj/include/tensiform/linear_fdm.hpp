#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tensiform/model.hpp"

namespace tensiform {

/// Signed incidence matrix C: one row per member, +1 at the first endpoint,
/// -1 at the second.
struct BranchNodeMatrix {
    Eigen::MatrixXi entries;
};

BranchNodeMatrix build_branch_node_matrix(const Model& model);

/// D = C^T Q C in the sign convention of the classic X-Tensegrity display
/// (negative diagonal for positive force densities, i.e. -(Laplacian)),
/// partitioned into free-free and free-fixed node blocks. One matrix serves
/// all three axes.
struct DMatrices {
    Eigen::MatrixXd free_free;
    Eigen::MatrixXd free_fixed;  // empty when every node is free
    std::vector<int> free_nodes;
    std::vector<int> fixed_nodes;
};

/// Full N x N D over all nodes, same sign convention.
Eigen::MatrixXd assemble_full_D(const Model& model, const std::vector<double>& force_densities);
DMatrices assemble_D(const Model& model, const std::vector<double>& force_densities);

struct NullSpaceReport {
    int rank = 0;
    int nullity = 0;
    Eigen::MatrixXd basis;  // orthonormal columns spanning ker(D)
    Eigen::VectorXd singular_values;
    double tolerance = 1e-10;
};

constexpr double kNullSpaceTolerance = 1e-10;

/// Rank/nullity by singular-value thresholding sigma_i <= tol * sigma_max.
NullSpaceReport null_space_analysis(const Eigen::MatrixXd& d, double tol = kNullSpaceTolerance);

class SingularSystem : public std::runtime_error {
public:
    SingularSystem(const std::string& what, NullSpaceReport report)
        : std::runtime_error(what), report_(std::move(report))
    {
    }
    const NullSpaceReport& report() const { return report_; }

private:
    NullSpaceReport report_;
};

struct LinearSolution {
    Coordinates coords;            // free coordinates in DofMap order
    std::vector<double> lengths;   // per member
    std::vector<double> tensions;  // n_j = q_j * L_j, per member
};

/// Solves D x = -D_f x_f per axis with one shared factorization.
/// Throws SingularSystem when there are no fixed nodes or D is singular.
LinearSolution solve_linear_fdm(const Model& model, const std::vector<double>& force_densities);

/// q per member when none is given: 2w for PowerLength(w,2) cables, 1 for
/// other cables, -1 for struts.
std::vector<double> default_force_densities(const Model& model);

}  // namespace tensiform
