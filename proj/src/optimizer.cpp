#include "tensiform/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "tensiform/detail/overloaded.hpp"
#include "tensiform/detail/parallel.hpp"
#include "tensiform/geometry.hpp"

namespace tensiform {

namespace {

constexpr int kMaxDegeneracyRetries = 3;
constexpr double kJitterScale = 1e-6;
constexpr double kRoundoffBand = 1e-13;

struct Evaluation {
    double energy = 0.0;
    Eigen::VectorXd tangent;  // gradient with strut-normal components removed
    GeneralizedForces forces;
    double scale = 1.0;
    bool rank_deficient = false;
};

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double force_scale(const GeneralizedForces& f, const Model& model)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& m : model.members) {
        if (m.role != MemberRole::Cable) continue;
        sum += std::abs(f.member_forces[m.id]);
        ++count;
    }
    for (double s : f.element_stresses) {
        sum += std::abs(s);
        ++count;
    }
    return std::max(1.0, count ? sum / static_cast<double>(count) : 0.0);
}

double length_scale(const Model& model)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& m : model.members) {
        if (m.role != MemberRole::Strut) continue;
        sum += m.prescribed_length;
        ++count;
    }
    return count ? sum / static_cast<double>(count) : 1.0;
}

double bounding_diagonal(const Model& model)
{
    if (model.nodes.empty()) return 1.0;
    Vec3 lo = model.nodes.front().position;
    Vec3 hi = lo;
    for (const auto& n : model.nodes) {
        lo = lo.cwiseMin(n.position);
        hi = hi.cwiseMax(n.position);
    }
    const double d = (hi - lo).norm();
    return d > 0.0 ? d : 1.0;
}

/// Splits g into its part tangent to the strut-length manifold and the
/// least-squares multipliers with g + J^T lambda ~ 0.
void split_gradient(const Eigen::MatrixXd& jac, const Eigen::VectorXd& g, Eigen::VectorXd& tangent,
                    std::vector<double>& multipliers, bool& rank_deficient)
{
    multipliers.clear();
    rank_deficient = false;
    if (jac.rows() == 0) {
        tangent = g;
        return;
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(jac.transpose());
    const Eigen::VectorXd mu = cod.solve(g);
    tangent = g - jac.transpose() * mu;
    rank_deficient = cod.rank() < jac.rows();
    multipliers.resize(static_cast<std::size_t>(mu.size()));
    for (Eigen::Index i = 0; i < mu.size(); ++i) multipliers[static_cast<std::size_t>(i)] = -mu[i];
}

Evaluation evaluate(const Model& model, const DofMap& dofs, const Coordinates& x)
{
    Evaluation ev;
    auto grad = total_gradient(model, dofs, x);
    ev.energy = total_energy(model, dofs, x);
    const auto pos = node_positions(model, dofs, x);
    const Eigen::MatrixXd jac = strut_jacobian(model, dofs, pos);
    split_gradient(jac, grad.gradient, ev.tangent, grad.forces.strut_multipliers, ev.rank_deficient);
    ev.forces = std::move(grad.forces);
    ev.scale = force_scale(ev.forces, model);
    return ev;
}

std::vector<int> offending_nodes(const Model& model, const DegenerateGeometry& err)
{
    if (err.kind() == DegenerateGeometry::Kind::Member && err.id() >= 0) {
        const auto& m = model.members[err.id()];
        return {m.endpoints[0], m.endpoints[1]};
    }
    if (err.kind() == DegenerateGeometry::Kind::Element && err.id() >= 0) {
        const auto& e = model.elements[err.id()];
        return {e.vertices[0], e.vertices[1], e.vertices[2]};
    }
    std::vector<int> all(model.nodes.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return all;
}

class Solver {
public:
    Solver(const Model& model, const SolveOptions& options)
        : model_(model), dofs_(build_dof_map(model)), options_(options), rng_(options.seed ^ 0x9e3779b97f4a7c15ULL)
    {
        scale_ = length_scale(model);
    }

    ConvergedState run()
    {
        Coordinates x = initial_coordinates();
        x = project_strut_lengths(model_, dofs_, std::move(x));
        Evaluation cur = evaluate_with_retry(x);

        state_.converged = false;
        if (options_.method == Method::Descent)
            descend(x, cur);
        else
            relax(x, cur);

        state_.coords = x;
        state_.energy = cur.energy;
        state_.residual_norm = inf_norm(cur.tangent);
        state_.residual_scale = cur.scale;
        state_.forces = cur.forces;
        state_.constraint_violation = constraint_violation(model_, dofs_, x);
        if (cur.rank_deficient) state_.events.push_back("strut gradients are rank deficient; minimal-norm multipliers");
        return std::move(state_);
    }

private:
    Coordinates initial_coordinates()
    {
        return std::visit(detail::overloaded{
                              [&](const RandomInit& r) { return random_initialization(dofs_.size(), r.range, options_.seed); },
                              [&](const GivenInit& g) {
                                  if (g.coords.size() != dofs_.size())
                                      throw std::invalid_argument("initial coordinates have the wrong dimension");
                                  return Coordinates(g.coords);
                              },
                              [&](const ModelInit& m) {
                                  Coordinates x = model_coordinates(model_, dofs_);
                                  if (m.jitter > 0.0)
                                      x += m.jitter * bounding_diagonal(model_) *
                                           random_initialization(dofs_.size(), 1.0, options_.seed);
                                  return x;
                              },
                          },
                          options_.init);
    }

    bool converged(const Evaluation& ev) const
    {
        return inf_norm(ev.tangent) <= options_.gradient_tolerance * ev.scale;
    }

    bool out_of_time() const
    {
        if (options_.max_seconds <= 0.0) return false;
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
        return elapsed.count() > options_.max_seconds;
    }

    void record(int iteration, const Evaluation& ev)
    {
        state_.trace.push_back({iteration, ev.energy, inf_norm(ev.tangent)});
    }

    Evaluation evaluate_with_retry(Coordinates& x)
    {
        for (int attempt = 0;; ++attempt) {
            try {
                return evaluate(model_, dofs_, x);
            } catch (const DegenerateGeometry& err) {
                if (attempt >= kMaxDegeneracyRetries) throw;
                jitter(x, offending_nodes(model_, err));
                x = project_strut_lengths(model_, dofs_, std::move(x));
                state_.events.push_back(std::string("jittered after degeneracy: ") + err.what());
            }
        }
    }

    void jitter(Coordinates& x, const std::vector<int>& nodes)
    {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const double amount = kJitterScale * scale_;
        for (int node : nodes) {
            if (!dofs_.is_free(node)) continue;
            for (int axis = 0; axis < 3; ++axis) x[dofs_.index(node, axis)] += amount * u(rng_);
        }
    }

    double initial_step() const
    {
        return options_.step.initial_step > 0.0 ? options_.step.initial_step : 1e-2 * scale_;
    }

    // Projected steepest descent. Trial steps come from the Barzilai-Borwein
    // formula and are backtracked until the post-projection energy satisfies
    // the Armijo condition.
    void descend(Coordinates& x, Evaluation& cur)
    {
        const auto& sc = options_.step;
        double alpha = initial_step() / std::max(inf_norm(cur.tangent), std::numeric_limits<double>::min());
        int it = 0;
        for (; it < options_.max_iterations; ++it) {
            record(it, cur);
            if (converged(cur)) {
                state_.converged = true;
                break;
            }
            if ((it & 255) == 0 && out_of_time()) {
                state_.events.push_back("wall-clock limit reached");
                break;
            }

            bool accepted = false;
            Coordinates trial;
            Evaluation next;
            const double g2 = cur.tangent.squaredNorm();
            for (int bt = 0; bt <= sc.max_backtracks && !accepted; ++bt, alpha *= sc.backtrack) {
                try {
                    trial = project_strut_lengths(model_, dofs_, x - alpha * cur.tangent);
                } catch (const DegenerateGeometry&) {
                    continue;
                }
                const double e = total_energy(model_, dofs_, trial);
                if (!std::isfinite(e)) continue;
                const double predicted = cur.tangent.dot(trial - x);
                if (e <= cur.energy + sc.armijo * std::min(predicted, 0.0)) {
                    next = evaluate_with_retry(trial);
                    accepted = true;
                } else if (e <= cur.energy + kRoundoffBand * std::max(1.0, std::abs(cur.energy))) {
                    // Energy differences are at rounding level; fall back to
                    // requiring a smaller tangential gradient.
                    Evaluation cand = evaluate_with_retry(trial);
                    if (cand.tangent.squaredNorm() < g2) {
                        next = std::move(cand);
                        accepted = true;
                    }
                }
                if (accepted) break;
            }
            if (!accepted) {
                state_.events.push_back("line search stalled at iteration " + std::to_string(it));
                break;
            }

            const Eigen::VectorXd s = trial - x;
            const Eigen::VectorXd y = next.tangent - cur.tangent;
            const double sy = s.dot(y);
            alpha = sy > 0.0 ? s.squaredNorm() / sy : 2.0 * alpha;
            alpha = std::clamp(alpha, 1e-30, 1e30);
            x = std::move(trial);
            cur = std::move(next);
        }
        state_.iterations = it;
    }

    // Dynamic relaxation with kinetic damping: pseudo-velocities accumulate
    // the negative tangential gradient and are zeroed at each kinetic energy
    // peak. The fictitious mass doubles whenever a step raises the energy.
    void relax(Coordinates& x, Evaluation& cur)
    {
        double mass = std::max(inf_norm(cur.tangent), std::numeric_limits<double>::min()) / initial_step();
        Eigen::VectorXd velocity = Eigen::VectorXd::Zero(x.size());
        double previous_ke = 0.0;
        int it = 0;
        for (; it < options_.max_iterations; ++it) {
            record(it, cur);
            if (converged(cur)) {
                state_.converged = true;
                break;
            }
            if ((it & 255) == 0 && out_of_time()) {
                state_.events.push_back("wall-clock limit reached");
                break;
            }
            velocity -= cur.tangent / mass;
            Coordinates trial;
            try {
                trial = project_strut_lengths(model_, dofs_, x + velocity);
            } catch (const DegenerateGeometry&) {
                mass *= 2.0;
                velocity.setZero();
                continue;
            }
            const double e = total_energy(model_, dofs_, trial);
            if (!std::isfinite(e) || e > cur.energy + kRoundoffBand * std::max(1.0, std::abs(cur.energy))) {
                mass *= 2.0;
                velocity.setZero();
                previous_ke = 0.0;
                continue;
            }
            Evaluation next = evaluate_with_retry(trial);
            velocity = trial - x;
            const double ke = 0.5 * mass * velocity.squaredNorm();
            if (ke < previous_ke) {
                velocity.setZero();
                previous_ke = 0.0;
            } else {
                previous_ke = ke;
            }
            x = std::move(trial);
            cur = std::move(next);
        }
        state_.iterations = it;
    }

    const Model& model_;
    DofMap dofs_;
    SolveOptions options_;
    std::mt19937_64 rng_;
    double scale_ = 1.0;
    ConvergedState state_;
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

void check_options(const SolveOptions& options)
{
    if (!(options.gradient_tolerance > 0.0)) throw std::invalid_argument("gradient tolerance must be positive");
    if (options.max_iterations < 0) throw std::invalid_argument("max iterations must be non-negative");
    if (const auto* r = std::get_if<RandomInit>(&options.init); r && !(r->range > 0.0))
        throw std::invalid_argument("random init range must be positive");
    if (!(options.step.backtrack > 0.0 && options.step.backtrack < 1.0))
        throw std::invalid_argument("backtracking factor must lie in (0, 1)");
}

Coordinates random_initialization(int n, double range, std::uint64_t seed)
{
    if (!(range > 0.0)) throw std::invalid_argument("range must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-range, range);
    Coordinates x(n);
    for (int i = 0; i < n; ++i) x[i] = u(rng);
    return x;
}

Coordinates project_strut_lengths(const Model& model, const DofMap& dofs, Coordinates coords)
{
    for (const auto& m : model.members) {
        if (m.role != MemberRole::Strut) continue;
        const auto [a, b] = m.endpoints;
        const bool free_a = dofs.is_free(a);
        const bool free_b = dofs.is_free(b);
        if (!free_a && !free_b) continue;

        const Vec3 p = free_a ? Vec3(coords.segment<3>(dofs.node_offset[a])) : model.nodes[a].position;
        const Vec3 q = free_b ? Vec3(coords.segment<3>(dofs.node_offset[b])) : model.nodes[b].position;
        const Vec3 d = q - p;
        const double length = d.norm();
        if (!(length > kLengthEpsilon))
            throw DegenerateGeometry(DegenerateGeometry::Kind::Member, m.id,
                                     "strut " + std::to_string(m.id) + " has zero length");
        if (length == m.prescribed_length) continue;
        const Vec3 u = d / length;
        if (free_a && free_b) {
            const Vec3 mid = 0.5 * (p + q);
            coords.segment<3>(dofs.node_offset[a]) = mid - 0.5 * m.prescribed_length * u;
            coords.segment<3>(dofs.node_offset[b]) = mid + 0.5 * m.prescribed_length * u;
        } else if (free_b) {
            coords.segment<3>(dofs.node_offset[b]) = p + m.prescribed_length * u;
        } else {
            coords.segment<3>(dofs.node_offset[a]) = q - m.prescribed_length * u;
        }
    }
    return coords;
}

double constraint_violation(const Model& model, const DofMap& dofs, const Coordinates& coords)
{
    const auto pos = node_positions(model, dofs, coords);
    double worst = 0.0;
    for (const auto& m : model.members) {
        if (m.role != MemberRole::Strut) continue;
        const double length = member_length(pos[m.endpoints[0]], pos[m.endpoints[1]]);
        worst = std::max(worst, std::abs(length - m.prescribed_length));
    }
    return worst;
}

MultiplierFit recover_multipliers(const Model& model, const DofMap& dofs, const Coordinates& coords,
                                  const GeneralizedForces& forces)
{
    const auto pos = node_positions(model, dofs, coords);
    Eigen::VectorXd residual = Eigen::VectorXd::Zero(dofs.size());
    for (const auto& m : model.members)
        if (m.role == MemberRole::Cable) accumulate_length_gradient(residual, dofs, m, pos, forces.member_forces[m.id]);
    for (const auto& e : model.elements) accumulate_area_gradient(residual, dofs, e, pos, forces.element_stresses[e.id]);

    MultiplierFit fit;
    fit.residual_before = inf_norm(residual);
    Eigen::VectorXd tangent;
    split_gradient(strut_jacobian(model, dofs, pos), residual, tangent, fit.multipliers, fit.rank_deficient);
    fit.residual_after = inf_norm(tangent);
    return fit;
}

ConvergedState minimize_constrained(const Model& model, const SolveOptions& options)
{
    check_options(options);
    return Solver(model, options).run();
}

std::vector<ConvergedState> minimize_batch(const Model& model, const SolveOptions& options,
                                           const std::vector<std::uint64_t>& seeds)
{
    check_options(options);
    std::vector<ConvergedState> results(seeds.size());
    detail::parallel_for(seeds.size(), [&](std::size_t i) {
        SolveOptions local = options;
        local.seed = seeds[i];
        results[i] = Solver(model, local).run();
    });
    return results;
}

}  // namespace tensiform
