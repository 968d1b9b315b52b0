#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "tensiform/functionals.hpp"
#include "tensiform/model.hpp"

namespace tensiform {

/// Uniform in [-range, range] per free coordinate.
struct RandomInit {
    double range = 2.5;
};

struct GivenInit {
    Coordinates coords;
};

/// Start from the positions stored in the model, plus a seeded uniform
/// jitter of `jitter` times the model's bounding-box diagonal.
struct ModelInit {
    double jitter = 0.0;
};

using Initialization = std::variant<RandomInit, GivenInit, ModelInit>;

enum class Method { Descent, DynamicRelaxation };

struct StepControl {
    double initial_step = 0.0;  // <= 0: 1e-2 * (mean strut length, or 1)
    double backtrack = 0.5;
    double armijo = 1e-4;
    int max_backtracks = 60;
};

struct SolveOptions {
    int max_iterations = 200000;
    double gradient_tolerance = 1e-8;
    std::uint64_t seed = 0;
    Initialization init = RandomInit{};
    StepControl step;
    Method method = Method::Descent;
    double max_seconds = 0.0;  // wall-clock cap, <= 0 disables it
};

/// Throws std::invalid_argument on a bad tolerance, range or iteration count.
void check_options(const SolveOptions& options);

struct TraceEntry {
    int iteration = 0;
    double energy = 0.0;
    double residual = 0.0;
};

struct ConvergedState {
    Coordinates coords;
    GeneralizedForces forces;
    double energy = 0.0;
    double residual_norm = 0.0;         // inf-norm of the tangential gradient
    double residual_scale = 1.0;        // max(1, mean |n_j|, |sigma_k|)
    double constraint_violation = 0.0;  // max |L_k - Lbar_k|
    int iterations = 0;
    bool converged = false;
    std::vector<TraceEntry> trace;
    std::vector<std::string> events;  // degeneracy jitters, stalls, time-outs
};

Coordinates random_initialization(int n, double range, std::uint64_t seed);

/// Rescales each strut about its midpoint to its prescribed length. A strut
/// with one fixed end is extended from that end; non-strut nodes are untouched.
/// Throws DegenerateGeometry for a zero-length strut.
Coordinates project_strut_lengths(const Model& model, const DofMap& dofs, Coordinates coords);

/// max |L_k - Lbar_k| over struts (0 without struts).
double constraint_violation(const Model& model, const DofMap& dofs, const Coordinates& coords);

struct MultiplierFit {
    std::vector<double> multipliers;  // Model::strut_ids order
    double residual_before = 0.0;     // inf-norm of sum n grad L + sum sigma grad S
    double residual_after = 0.0;      // same, with the strut terms added
    bool rank_deficient = false;
};

/// Least-squares lambda for sum n grad L + sum sigma grad S + sum lambda grad L = 0.
MultiplierFit recover_multipliers(const Model& model, const DofMap& dofs, const Coordinates& coords,
                                  const GeneralizedForces& forces);

/// Minimizes the total element energy while holding every strut at its
/// prescribed length. Non-convergence is reported through `converged`.
ConvergedState minimize_constrained(const Model& model, const SolveOptions& options);

/// Independent solves, one per seed, run concurrently. Results keep seed order.
std::vector<ConvergedState> minimize_batch(const Model& model, const SolveOptions& options,
                                           const std::vector<std::uint64_t>& seeds);

}  // namespace tensiform
