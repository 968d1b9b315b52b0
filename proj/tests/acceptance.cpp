// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any hard failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "tensiform/analysis.hpp"
#include "tensiform/fixtures.hpp"
#include "tensiform/geometry.hpp"
#include "tensiform/io.hpp"
#include "tensiform/linear_fdm.hpp"
#include "tensiform/optimizer.hpp"

using namespace tensiform;

namespace {

enum class Verdict { Pass, Fail, SoftFail };

struct Outcome {
    Verdict verdict = Verdict::Fail;
    std::string detail;
};

struct Solved {
    std::string name;
    Model model;
    ConvergedState state;
    double tolerance = 0.0;
};

std::vector<Solved> g_solved;  // converged states collected for the self-stress check

class Stopwatch {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string format(const char* fmt, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

Verdict verdict(bool ok) { return ok ? Verdict::Pass : Verdict::Fail; }

SolveOptions options(std::uint64_t seed, Initialization init = RandomInit{})
{
    SolveOptions o;
    o.seed = seed;
    o.init = std::move(init);
    return o;
}

void keep(const std::string& name, const Model& m, const ConvergedState& s, const SolveOptions& o)
{
    if (s.converged) g_solved.push_back({name, m, s, o.gradient_tolerance});
}

// ---------------------------------------------------------------------------

Outcome gradient_correctness()
{
    Stopwatch clock;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    auto vec = [&] { return Vec3(u(rng), u(rng), u(rng)); };
    const double h = 1e-6;
    auto fd = [&](const std::function<double(const Vec3&)>& f, const Vec3& at) {
        Vec3 g;
        for (int a = 0; a < 3; ++a) {
            Vec3 lo = at, hi = at;
            lo[a] -= h;
            hi[a] += h;
            g[a] = (f(hi) - f(lo)) / (2 * h);
        }
        return g;
    };
    auto rel = [](const Vec3& a, const Vec3& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); };

    double worst = 0.0;
    const int configs = 500;
    for (int i = 0; i < configs; ++i) {
        const Vec3 p = vec(), q = vec(), r = vec();
        const auto gl = member_length_gradient(p, q);
        worst = std::max(worst, rel(gl.at_p, fd([&](const Vec3& x) { return member_length(x, q); }, p)));
        worst = std::max(worst, rel(gl.at_q, fd([&](const Vec3& x) { return member_length(p, x); }, q)));
        const auto ga = triangle_area_gradient(p, q, r);
        worst = std::max(worst, rel(ga.at_p, fd([&](const Vec3& x) { return triangle_area(x, q, r); }, p)));
        worst = std::max(worst, rel(ga.at_q, fd([&](const Vec3& x) { return triangle_area(p, x, r); }, q)));
        worst = std::max(worst, rel(ga.at_r, fd([&](const Vec3& x) { return triangle_area(p, q, x); }, r)));
    }
    const double t = clock.seconds();
    return {verdict(worst <= 1e-6 && t < 5.0),
            format("%d cable + %d triangle configurations, worst relative error %.2e (limit 1e-6), %.2f s", configs,
                   configs, worst, t)};
}

Outcome linear_pathology()
{
    const Model m = fixtures::make_x_tensegrity();
    Eigen::Matrix4d d1, d2;
    d1 << -1, -1, 1, 1, -1, -1, 1, 1, 1, 1, -1, -1, 1, 1, -1, -1;
    d2 << -3, -1, 2, 2, -1, -3, 2, 2, 2, 2, -3, -1, 2, 2, -1, -3;
    const bool exact = assemble_D(m, {1, 1, 1, 1, -1, -1}).free_free == d1 &&
                       assemble_D(m, {2, 2, 2, 2, -1, -1}).free_free == d2;

    const auto r3 = null_space_analysis(d1);
    const auto r1 = null_space_analysis(d2);
    auto residual = [](const NullSpaceReport& r, Eigen::Vector4d v) {
        v.normalize();
        return (v - r.basis * (r.basis.transpose() * v)).norm();
    };
    const double worst = std::max({residual(r3, {1, 1, 1, 1}), residual(r3, {1, -1, 0, 0}), residual(r3, {0, 0, 1, -1}),
                                   residual(r1, {1, 1, 1, 1})});
    const bool ok = exact && r3.nullity == 3 && r1.nullity == 1 && worst <= 1e-10;
    return {verdict(ok), format("printed D matrices %s; nullity %d and %d (expected 3 and 1); kernel residual %.1e",
                                exact ? "reproduced exactly" : "MISMATCH", r3.nullity, r1.nullity, worst)};
}

Outcome linear_variational_equivalence()
{
    Stopwatch clock;
    Model m = fixtures::make_net(10, 10);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    std::vector<double> q(m.members.size());
    m.functionals.clear();
    for (auto& mem : m.members) {
        q[mem.id] = u(rng);
        mem.functional = static_cast<int>(m.functionals.size());
        m.functionals.push_back(PowerLength{0.5 * q[mem.id], 2});
    }
    const LinearSolution lin = solve_linear_fdm(m, q);
    SolveOptions o = options(3);
    o.gradient_tolerance = 1e-12;
    const ConvergedState s = minimize_constrained(m, o);
    const double diff = (s.coords - lin.coords).cwiseAbs().maxCoeff();
    const double t = clock.seconds();
    return {verdict(s.converged && diff <= 1e-6 && t < 10.0),
            format("10x10 net, random q in [0.5, 2]: max coordinate difference %.2e (limit 1e-6), %d iterations, %.2f s",
                   diff, s.iterations, t)};
}

Outcome power_two_degeneracy()
{
    // Equal diagonals d: a square and a 1 x 2 rectangle carry the same sum of squared sides.
    const double d = std::sqrt(5.0);
    const double side = d / std::sqrt(2.0);
    const double square = 4.0 * side * side;
    const double rectangle = 2.0 * (1.0 * 1.0 + 2.0 * 2.0);
    const double gap = std::abs(square - rectangle);

    // Under w L^4 with diagonals crossing at their midpoints at angle theta the
    // cables are Lbar sin(theta/2) and Lbar cos(theta/2). Scan theta for the minimum.
    const double lbar = 1.0;
    double best_theta = 0.0, best_energy = 1e300;
    for (int i = 1; i < 100000; ++i) {
        const double theta = std::numbers::pi * i / 100000.0;
        const double a = lbar * std::sin(theta / 2), b = lbar * std::cos(theta / 2);
        const double e = 2.0 * (std::pow(a, 4) + std::pow(b, 4));
        if (e < best_energy) best_energy = e, best_theta = theta;
    }

    const Model m = fixtures::make_x_tensegrity({1, 1, 1, 1}, {lbar, lbar}, 4);
    const DofMap dofs = build_dof_map(m);
    int at_square = 0;
    double worst = 0.0, energy_gap = 0.0;
    const int seeds = 12;
    for (int seed = 1; seed <= seeds; ++seed) {
        const SolveOptions o = options(static_cast<std::uint64_t>(seed));
        const ConvergedState s = minimize_constrained(m, o);
        keep("x_tensegrity seed " + std::to_string(seed), m, s, o);
        const auto pos = node_positions(m, dofs, s.coords);
        double dev = 0.0;
        for (int id : m.cable_ids()) {
            const auto& c = m.members[id];
            dev = std::max(dev, std::abs(member_length(pos[c.endpoints[0]], pos[c.endpoints[1]]) - lbar / std::sqrt(2.0)));
        }
        worst = std::max(worst, dev);
        energy_gap = std::max(energy_gap, std::abs(s.energy - best_energy));
        at_square += s.converged && dev <= 1e-4 ? 1 : 0;
    }
    const bool ok = gap <= 1e-12 && at_square == seeds && std::abs(best_theta - std::numbers::pi / 2) < 1e-4 &&
                    energy_gap <= 1e-6;
    return {verdict(ok), format("sum L^2 square vs 1x2 rectangle differ by %.1e; sum L^4: %d/%d seeds reach the square "
                                "(worst |L - Lbar/sqrt2| = %.1e), scan minimum at %.4f rad, energy gap %.1e",
                                gap, at_square, seeds, worst, best_theta, energy_gap)};
}

Outcome simplex()
{
    Stopwatch clock;
    const Model m = fixtures::make_simplex(10.0, 1.0, 4);
    const DofMap dofs = build_dof_map(m);
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
    const SolveOptions o = options(0, RandomInit{2.5});
    const auto states = minimize_batch(m, o, seeds);

    int converged = 0, good = 0;
    double worst_residual = 0.0, worst_violation = 0.0, worst_asym = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& s = states[i];
        if (!s.converged) continue;
        ++converged;
        SolveOptions oi = o;
        oi.seed = seeds[i];
        keep("simplex seed " + std::to_string(seeds[i]), m, s, oi);
        const auto eq = equilibrium_residual(m, dofs, s.coords, s.forces);
        const auto pos = node_positions(m, dofs, s.coords);
        bool signs = true;
        for (int id : m.cable_ids()) signs = signs && s.forces.member_forces[id] > 0.0;
        for (double l : s.forces.strut_multipliers) signs = signs && l < 0.0;
        // Cables come in three groups of three: two triangles and the verticals.
        double asym = 0.0;
        for (int g = 0; g < 3; ++g) {
            double lo = 1e300, hi = -1e300;
            for (int k = 0; k < 3; ++k) {
                const auto& c = m.members[3 * g + k];
                const double l = member_length(pos[c.endpoints[0]], pos[c.endpoints[1]]);
                lo = std::min(lo, l);
                hi = std::max(hi, l);
            }
            asym = std::max(asym, hi - lo);
        }
        worst_residual = std::max(worst_residual, eq.relative_norm);
        worst_violation = std::max(worst_violation, s.constraint_violation);
        worst_asym = std::max(worst_asym, asym);
        good += signs && s.constraint_violation <= 1e-9 * 10.0 && eq.relative_norm <= 1e-6 && asym <= 1e-3 ? 1 : 0;
    }
    const double t = clock.seconds();
    const bool ok = converged >= 18 && good == converged && t < 30.0;
    return {verdict(ok), format("%d/20 converged, %d with n > 0, lambda < 0, violation %.1e, relative residual %.1e, "
                                "3-fold asymmetry %.1e; %.2f s",
                                converged, good, worst_violation, worst_residual, worst_asym, t)};
}

Outcome minimal_surfaces()
{
    Stopwatch clock;
    struct Case {
        double h;
        double area;
    };
    bool ok = true;
    std::string detail;
    for (const Case c : {Case{4.0, 122.0}, Case{6.5, 186.0}}) {
        const Model base = fixtures::make_ring_membrane(c.h);
        SolveOptions o = options(1, ModelInit{});
        const auto rows = compare_functionals(base, {PlainArea{}, PowerArea{1.0, 2}}, o);
        for (const auto& r : rows) ok = ok && r.ok && r.converged;
        if (!ok) {
            detail += format("h=%.1f: solve failed; ", c.h);
            continue;
        }
        const double a1 = rows[0].total_area, a2 = rows[1].total_area;
        const double cv1 = rows[0].measure.coefficient_of_variation, cv2 = rows[1].measure.coefficient_of_variation;
        const bool case_ok = std::abs(a1 - c.area) <= 0.05 * c.area && std::abs(a2 - c.area) <= 0.05 * c.area &&
                             std::abs(a1 - a2) <= 0.02 * std::min(a1, a2) && cv2 < cv1;
        ok = ok && case_ok;
        detail += format("h=%.1f: area S %.2f, S^2 %.2f (target %.0f), cv S %.4f > S^2 %.4f; ", c.h, a1, a2, c.area, cv1,
                         cv2);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            Model m = base;
            m.functionals = {i == 0 ? ElementFunctional{PlainArea{}} : ElementFunctional{PowerArea{1.0, 2}}};
            for (auto& e : m.elements) e.functional = 0;
            ConvergedState s;
            s.coords = rows[i].coords;
            const DofMap dofs = build_dof_map(m);
            s.forces = total_gradient(m, dofs, s.coords).forces;
            s.converged = true;
            g_solved.push_back({format("ring h=%.1f %s", c.h, rows[i].label.c_str()), m, s, o.gradient_tolerance});
        }
    }
    const double t = clock.seconds();
    ok = ok && t < 60.0;
    return {verdict(ok), detail + format("%.2f s", t)};
}

Outcome strut20()
{
    Stopwatch clock;
    int good = 0;
    std::string failed;
    for (int c = 1; c <= 9; ++c) {
        const Model m = fixtures::make_strut20(c, 1.0, 2.0, 10.0, 4);
        const SolveOptions o = options(1);
        const auto s = minimize_constrained(m, o);
        keep("strut20 C" + std::to_string(c), m, s, o);
        bool positive = true;
        for (int id : m.cable_ids()) positive = positive && s.forces.member_forces[id] > 0.0;
        if (s.converged && positive && s.constraint_violation <= 1e-9 * 10.0)
            ++good;
        else
            failed += " C" + std::to_string(c);
    }

    const Model c6 = fixtures::make_strut20(6, 1.0, 2.0, 10.0, 4);
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
    const auto batch = minimize_batch(c6, options(0), seeds);
    std::vector<double> energies;
    for (const auto& s : batch)
        if (s.converged) energies.push_back(s.energy);
    std::sort(energies.begin(), energies.end());
    int clusters = energies.empty() ? 0 : 1;
    for (std::size_t i = 1; i < energies.size(); ++i)
        if (energies[i] - energies[i - 1] > 1e-6 * energies[i]) ++clusters;
    std::string energy_list;
    for (std::size_t i = 0; i < energies.size(); ++i)
        if (i == 0 || energies[i] - energies[i - 1] > 1e-6 * energies[i]) energy_list += format(" %.3f", energies[i]);

    const double t = clock.seconds();
    const std::string detail =
        format("%d/9 families converged with n > 0 and constraints met%s; C6: %zu/20 converged, %d energy clusters (%s ); "
               "%.1f s",
               good, failed.empty() ? "" : (" (failed:" + failed + ")").c_str(), energies.size(), clusters,
               energy_list.c_str(), t);
    if (good != 9 || t >= 300.0) return {Verdict::Fail, detail};
    return {clusters >= 2 ? Verdict::Pass : Verdict::SoftFail, detail};
}

Outcome cuboctahedron()
{
    Stopwatch clock;
    const Model m = fixtures::make_cuboctahedron_membrane(2.0, 1.0, 10.0);
    const bool counts = m.cable_count() == 192 && m.elements.size() == 768 && m.strut_count() == 6;
    const SolveOptions o = options(1, ModelInit{1e-3});
    const auto s = minimize_constrained(m, o);
    keep("cuboctahedron", m, s, o);
    const DofMap dofs = build_dof_map(m);
    const auto eq = equilibrium_residual(m, dofs, s.coords, s.forces);
    const bool self_stress = eq.inf_norm <= 10.0 * o.gradient_tolerance * s.residual_scale;
    bool signs = true;
    for (int id : m.cable_ids()) signs = signs && s.forces.member_forces[id] > 0.0;
    for (double l : s.forces.strut_multipliers) signs = signs && l < 0.0;
    const double t = clock.seconds();
    const bool ok = counts && s.converged && self_stress && s.constraint_violation <= 1e-9 * 10.0 && t < 300.0;
    return {verdict(ok), format("%zu cables, %zu triangles, %zu struts; converged %s in %d iterations, residual %.1e "
                                "(limit %.1e), violation %.1e, cables %s, struts %s; %.1f s",
                                m.cable_count(), m.elements.size(), m.strut_count(), s.converged ? "yes" : "no",
                                s.iterations, eq.inf_norm, 10.0 * o.gradient_tolerance * s.residual_scale,
                                s.constraint_violation, signs ? "in tension" : "MIXED",
                                signs ? "in compression" : "MIXED", t)};
}

void solve_remaining_fixtures()
{
    for (const char* name : {"net", "net220", "tanzbrunnen"}) {
        const Model m = io::make_fixture(name);
        const SolveOptions o = options(1, ModelInit{});
        keep(name, m, minimize_constrained(m, o), o);
    }
}

Outcome self_stress()
{
    int checked = 0, passed = 0, weight_checks = 0;
    double worst_ratio = 0.0, worst_weight = 0.0;
    std::string failures;
    for (const auto& entry : g_solved) {
        const DofMap dofs = build_dof_map(entry.model);
        const auto eq = equilibrium_residual(entry.model, dofs, entry.state.coords, entry.state.forces);
        // The same force scale the convergence test uses.
        const double scale = std::max(1.0, eq.inf_norm / std::max(eq.relative_norm, 1e-300));
        const double limit = 10.0 * entry.tolerance * scale;
        bool ok = eq.inf_norm <= limit;
        worst_ratio = std::max(worst_ratio, eq.inf_norm / limit);

        for (const auto& d : extended_force_densities(entry.model, dofs, entry.state.coords, entry.state.forces)) {
            const auto* f = std::get_if<PowerLength>(&entry.model.functionals[entry.model.members[d.member_id].functional]);
            if (!f || (f->power != 2 && f->power != 4)) continue;
            const double w = f->power == 2 ? d.w2 : d.w4;
            const double err = std::abs(w - f->weight) / f->weight;
            worst_weight = std::max(worst_weight, err);
            ok = ok && err <= 1e-12;
            ++weight_checks;
        }
        ++checked;
        if (ok)
            ++passed;
        else
            failures += " [" + entry.name + "]";
    }
    return {verdict(checked > 0 && passed == checked),
            format("%d/%d converged states balance within 10 tol (worst %.2f of limit); %d cable weights recovered, "
                   "worst relative error %.1e%s",
                   passed, checked, worst_ratio, weight_checks, worst_weight, failures.c_str())};
}

}  // namespace

int main()
{
    struct Criterion {
        const char* id;
        const char* title;
        std::function<Outcome()> run;
        Outcome outcome;
    };
    std::vector<Criterion> criteria{
        {"A1", "gradient correctness", gradient_correctness, {}},
        {"A2", "X-Tensegrity linear pathology", linear_pathology, {}},
        {"A3", "linear/variational equivalence", linear_variational_equivalence, {}},
        {"A4", "sum w L^2 degeneracy", power_two_degeneracy, {}},
        {"A5", "Simplex tensegrity", simplex, {}},
        {"A6", "minimal-surface areas", minimal_surfaces, {}},
        {"A8", "20-strut families", strut20, {}},
        {"A9", "cuboctahedron membrane-tensegrity", cuboctahedron, {}},
    };
    for (auto& c : criteria) {
        try {
            c.outcome = c.run();
        } catch (const std::exception& e) {
            c.outcome = {Verdict::Fail, std::string("exception: ") + e.what()};
        }
    }
    Criterion a7{"A7", "self-stress consistency", self_stress, {}};
    try {
        solve_remaining_fixtures();
        a7.outcome = a7.run();
    } catch (const std::exception& e) {
        a7.outcome = {Verdict::Fail, std::string("exception: ") + e.what()};
    }
    criteria.insert(criteria.begin() + 6, std::move(a7));

    int hard = 0;
    for (const auto& c : criteria) {
        const char* tag = c.outcome.verdict == Verdict::Pass ? "PASS" : c.outcome.verdict == Verdict::SoftFail ? "SOFT-FAIL" : "FAIL";
        std::printf("%s %-9s %s: %s\n", c.id, tag, c.title, c.outcome.detail.c_str());
        hard += c.outcome.verdict == Verdict::Fail ? 1 : 0;
    }
    std::printf("%d of %zu criteria failed\n", hard, criteria.size());
    return hard == 0 ? 0 : 1;
}
