#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tensiform/functionals.hpp"
#include "tensiform/model.hpp"
#include "tensiform/optimizer.hpp"

namespace tensiform {

struct EquilibriumReport {
    Eigen::VectorXd residual;              // flat, DofMap order
    std::vector<Vec3> node_residuals;      // one per free node, DofMap order
    double inf_norm = 0.0;
    double relative_norm = 0.0;            // inf_norm / mean |n_j|, |sigma_k|
    std::vector<double> member_forces;     // n_j for cables, lambda for struts
    std::vector<double> force_densities;   // n_j / L_j per member
    std::vector<double> strut_multipliers; // Model::strut_ids order
};

/// Residual of sum n grad L + sum sigma grad S + sum lambda grad L over the free
/// coordinates. Strut terms are skipped when forces.strut_multipliers is empty.
EquilibriumReport equilibrium_residual(const Model& model, const DofMap& dofs, const Coordinates& coords,
                                       const GeneralizedForces& forces);

struct ExtendedDensity {
    int member_id = 0;
    double length = 0.0;
    double force = 0.0;
    double q = 0.0;   // n / L
    double w2 = 0.0;  // n / (2 L)
    double w4 = 0.0;  // n / (4 L^3)
};

/// Force densities of every cable. Throws DegenerateGeometry for a zero-length cable.
std::vector<ExtendedDensity> extended_force_densities(const Model& model, const DofMap& dofs,
                                                      const Coordinates& coords, const GeneralizedForces& forces);

/// Virtual work sum n dL + sum sigma dS + sum lambda dL for one variation dx,
/// with dL and dS linearized through the analytic gradients.
double virtual_work(const Model& model, const DofMap& dofs, const Coordinates& coords,
                    const GeneralizedForces& forces, const Eigen::VectorXd& variation);

/// Worst |dw| / (|forces| |dx|) over `samples` random variations tangent to the
/// strut-length constraints.
double virtual_work_check(const Model& model, const DofMap& dofs, const Coordinates& coords,
                          const GeneralizedForces& forces, std::uint64_t seed, int samples = 10);

struct MeasureStats {
    double total = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    double coefficient_of_variation = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::vector<int> histogram;  // 10 equal bins over [min, max]
};

MeasureStats measure_stats(const std::vector<double>& values, int bins = 10);

struct ComparisonRow {
    std::string label;
    bool ok = false;
    std::string error;
    bool converged = false;
    int iterations = 0;
    double energy = 0.0;
    double residual_norm = 0.0;
    double total_length = 0.0;
    double total_area = 0.0;
    MeasureStats measure;  // element areas for area functionals, cable lengths otherwise
    Coordinates coords;
};

/// One solve per functional with a shared seed. A length functional replaces
/// every cable's functional, an area functional every triangle's. A failing
/// row records its error and the rest still run.
std::vector<ComparisonRow> compare_functionals(const Model& model, const std::vector<ElementFunctional>& functionals,
                                               const SolveOptions& options);

}  // namespace tensiform
