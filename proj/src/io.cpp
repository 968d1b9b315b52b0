#include "tensiform/io.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "tensiform/detail/overloaded.hpp"
#include "tensiform/fixtures.hpp"
#include "tensiform/geometry.hpp"

#ifndef TENSIFORM_FIXTURE_DIR
#define TENSIFORM_FIXTURE_DIR "fixtures"
#endif

namespace tensiform::io {

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback)
{
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? fallback : it->get<T>();
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json vector_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from_json(const json& j)
{
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json positions_to_json(const std::vector<Vec3>& pos)
{
    json out = json::array();
    for (const auto& p : pos) out.push_back(vec_to_json(p));
    return out;
}

json trace_summary(const std::vector<TraceEntry>& trace)
{
    json out;
    out["length"] = trace.size();
    json samples = json::array();
    if (!trace.empty()) {
        const std::size_t stride = std::max<std::size_t>(1, trace.size() / 100);
        for (std::size_t i = 0; i < trace.size(); i += stride)
            samples.push_back({{"iteration", trace[i].iteration}, {"energy", trace[i].energy}, {"residual", trace[i].residual}});
        const auto& last = trace.back();
        if (samples.back()["iteration"] != last.iteration)
            samples.push_back({{"iteration", last.iteration}, {"energy", last.energy}, {"residual", last.residual}});
    }
    out["samples"] = std::move(samples);
    return out;
}

}  // namespace

json functional_to_json(const ElementFunctional& f)
{
    return std::visit(detail::overloaded{
                          [](const PowerLength& p) {
                              return json{{"variant", "PowerLength"}, {"params", {{"w", p.weight}, {"p", p.power}}}};
                          },
                          [](const SpringLength& s) {
                              return json{{"variant", "SpringLength"},
                                          {"params", {{"k", s.stiffness}, {"rest_length", s.rest_length}}}};
                          },
                          [](const PowerArea& p) {
                              return json{{"variant", "PowerArea"}, {"params", {{"w", p.weight}, {"p", p.power}}}};
                          },
                          [](const PlainArea&) { return json{{"variant", "PlainArea"}, {"params", json::object()}}; },
                      },
                      f);
}

ElementFunctional functional_from_json(const json& j)
{
    const std::string variant = j.at("variant").get<std::string>();
    const json params = j.value("params", json::object());
    if (variant == "PowerLength") return PowerLength{params.at("w").get<double>(), params.at("p").get<int>()};
    if (variant == "SpringLength")
        return SpringLength{params.at("k").get<double>(), params.at("rest_length").get<double>()};
    if (variant == "PowerArea") return PowerArea{params.at("w").get<double>(), params.at("p").get<int>()};
    if (variant == "PlainArea") return PlainArea{};
    throw LoadError("unknown functional variant '" + variant + "'");
}

json model_to_json(const Model& model)
{
    json j;
    j["version"] = kFormatVersion;
    json nodes = json::array();
    for (const auto& n : model.nodes) nodes.push_back({{"id", n.id}, {"xyz", vec_to_json(n.position)}, {"fixed", n.fixed}});
    json functionals = json::array();
    for (std::size_t i = 0; i < model.functionals.size(); ++i) {
        json f = functional_to_json(model.functionals[i]);
        f["id"] = i;
        functionals.push_back(std::move(f));
    }
    json members = json::array();
    for (const auto& m : model.members) {
        json e{{"id", m.id}, {"endpoints", {m.endpoints[0], m.endpoints[1]}}};
        if (m.role == MemberRole::Cable) {
            e["role"] = "cable";
            e["functional_id"] = m.functional;
        } else {
            e["role"] = "strut";
            e["prescribed_length"] = m.prescribed_length;
        }
        members.push_back(std::move(e));
    }
    json elements = json::array();
    for (const auto& e : model.elements)
        elements.push_back({{"id", e.id},
                            {"vertices", {e.vertices[0], e.vertices[1], e.vertices[2]}},
                            {"functional_id", e.functional}});
    j["nodes"] = std::move(nodes);
    j["functionals"] = std::move(functionals);
    j["members"] = std::move(members);
    j["elements"] = std::move(elements);
    return j;
}

Model model_from_json(const json& j)
{
    if (!j.is_object()) throw LoadError("model must be a JSON object");
    const std::string version = j.value("version", "");
    if (version != kFormatVersion) throw LoadError("unknown model version '" + version + "'");

    Model m;
    std::vector<std::string> problems;
    try {
        for (const auto& n : j.at("nodes")) {
            const auto xyz = n.at("xyz").get<std::array<double, 3>>();
            m.nodes.push_back({n.at("id").get<int>(), Vec3(xyz[0], xyz[1], xyz[2]), n.value("fixed", false)});
        }
        // Functional ids may be listed in any order but must be dense.
        const json& fs = j.value("functionals", json::array());
        m.functionals.resize(fs.size());
        std::vector<bool> seen(fs.size(), false);
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const int id = fs[i].value("id", static_cast<int>(i));
            if (id < 0 || id >= static_cast<int>(fs.size()) || seen[id]) {
                problems.push_back("functional ids must be unique and dense from 0");
                continue;
            }
            seen[id] = true;
            m.functionals[id] = functional_from_json(fs[i]);
        }
        for (const auto& e : j.value("members", json::array())) {
            LinearMember mem;
            mem.id = e.at("id").get<int>();
            const auto ends = e.at("endpoints").get<std::array<int, 2>>();
            mem.endpoints = {ends[0], ends[1]};
            const std::string role = e.at("role").get<std::string>();
            if (role == "cable") {
                mem.role = MemberRole::Cable;
                mem.functional = e.at("functional_id").get<int>();
            } else if (role == "strut") {
                mem.role = MemberRole::Strut;
                mem.prescribed_length = e.at("prescribed_length").get<double>();
            } else {
                problems.push_back("member " + std::to_string(mem.id) + ": unknown role '" + role + "'");
            }
            m.members.push_back(mem);
        }
        for (const auto& e : j.value("elements", json::array())) {
            const auto v = e.at("vertices").get<std::array<int, 3>>();
            m.elements.push_back({e.at("id").get<int>(), {v[0], v[1], v[2]}, e.at("functional_id").get<int>()});
        }
    } catch (const json::exception& e) {
        throw LoadError(std::string("malformed model: ") + e.what());
    }

    auto violations = validate(m);
    problems.insert(problems.end(), violations.begin(), violations.end());
    if (!problems.empty()) {
        std::string what = "invalid model: " + problems.front();
        if (problems.size() > 1) what += " (and " + std::to_string(problems.size() - 1) + " more)";
        throw LoadError(what, std::move(problems));
    }
    return m;
}

Model parse_model(std::string_view text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw LoadError(std::string("syntax error: ") + e.what());
    }
    return model_from_json(j);
}

Model load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

void save_model(const Model& model, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << model_to_json(model).dump(1) << '\n';
}

SolveOptions options_from_json(const json& j)
{
    SolveOptions o;
    if (j.is_null()) return o;
    o.max_iterations = get_or(j, "max_iterations", o.max_iterations);
    o.gradient_tolerance = get_or(j, "gradient_tolerance", o.gradient_tolerance);
    o.seed = get_or<std::uint64_t>(j, "seed", o.seed);
    o.max_seconds = get_or(j, "max_seconds", o.max_seconds);
    const std::string method = get_or<std::string>(j, "method", "descent");
    if (method == "descent")
        o.method = Method::Descent;
    else if (method == "dynrelax")
        o.method = Method::DynamicRelaxation;
    else
        throw std::invalid_argument("unknown method '" + method + "'");
    if (auto it = j.find("init"); it != j.end()) {
        const std::string kind = it->value("kind", "random");
        if (kind == "random")
            o.init = RandomInit{it->value("range", 2.5)};
        else if (kind == "given")
            o.init = GivenInit{vector_from_json(it->at("coords"))};
        else if (kind == "model")
            o.init = ModelInit{it->value("jitter", 0.0)};
        else
            throw std::invalid_argument("unknown init kind '" + kind + "'");
    }
    if (auto it = j.find("step"); it != j.end()) {
        o.step.initial_step = it->value("initial_step", o.step.initial_step);
        o.step.backtrack = it->value("backtrack", o.step.backtrack);
        o.step.armijo = it->value("armijo", o.step.armijo);
        o.step.max_backtracks = it->value("max_backtracks", o.step.max_backtracks);
    }
    return o;
}

json options_to_json(const SolveOptions& o)
{
    json j{{"max_iterations", o.max_iterations},
           {"gradient_tolerance", o.gradient_tolerance},
           {"seed", o.seed},
           {"max_seconds", o.max_seconds},
           {"method", o.method == Method::Descent ? "descent" : "dynrelax"},
           {"step",
            {{"initial_step", o.step.initial_step},
             {"backtrack", o.step.backtrack},
             {"armijo", o.step.armijo},
             {"max_backtracks", o.step.max_backtracks}}}};
    j["init"] = std::visit(detail::overloaded{
                               [](const RandomInit& r) { return json{{"kind", "random"}, {"range", r.range}}; },
                               [](const GivenInit& g) { return json{{"kind", "given"}, {"coords", vector_to_json(g.coords)}}; },
                               [](const ModelInit& m) { return json{{"kind", "model"}, {"jitter", m.jitter}}; },
                           },
                           o.init);
    return j;
}

json null_space_to_json(const NullSpaceReport& r)
{
    json basis = json::array();
    for (Eigen::Index c = 0; c < r.basis.cols(); ++c) basis.push_back(vector_to_json(r.basis.col(c)));
    return {{"rank", r.rank},
            {"nullity", r.nullity},
            {"tolerance", r.tolerance},
            {"basis", std::move(basis)},
            {"singular_values", vector_to_json(r.singular_values)}};
}

json forces_to_json(const GeneralizedForces& f)
{
    return {{"members", f.member_forces}, {"elements", f.element_stresses}, {"struts", f.strut_multipliers}};
}

GeneralizedForces forces_from_json(const json& j)
{
    GeneralizedForces f;
    f.member_forces = j.value("members", std::vector<double>{});
    f.element_stresses = j.value("elements", std::vector<double>{});
    f.strut_multipliers = j.value("struts", std::vector<double>{});
    return f;
}

json state_to_json(const Model& model, const ConvergedState& state, std::uint64_t seed)
{
    const DofMap dofs = build_dof_map(model);
    double mean = 0.0;
    std::size_t count = 0;
    for (const auto& m : model.members)
        if (m.role == MemberRole::Cable) mean += std::abs(state.forces.member_forces[m.id]), ++count;
    for (double s : state.forces.element_stresses) mean += std::abs(s), ++count;
    mean = count ? mean / static_cast<double>(count) : 0.0;

    return {{"mode", "formfind"},
            {"seed", seed},
            {"converged", state.converged},
            {"iterations", state.iterations},
            {"energy", state.energy},
            {"residual_norm", state.residual_norm},
            {"relative_residual", mean > 0.0 ? state.residual_norm / mean : state.residual_norm},
            {"constraint_violation", state.constraint_violation},
            {"coords", vector_to_json(state.coords)},
            {"positions", positions_to_json(node_positions(model, dofs, state.coords))},
            {"forces", forces_to_json(state.forces)},
            {"lambda", state.forces.strut_multipliers},
            {"trace", trace_summary(state.trace)},
            {"events", state.events}};
}

json linear_to_json(const Model& model, const LinearSolution& solution, const std::vector<double>& q)
{
    const DofMap dofs = build_dof_map(model);
    return {{"mode", "linear"},
            {"coords", vector_to_json(solution.coords)},
            {"positions", positions_to_json(node_positions(model, dofs, solution.coords))},
            {"force_densities", q},
            {"lengths", solution.lengths},
            {"tensions", solution.tensions}};
}

json comparison_to_json(const std::vector<ComparisonRow>& rows, std::uint64_t seed)
{
    json out = json::array();
    for (const auto& r : rows) {
        json row{{"label", r.label}, {"ok", r.ok}};
        if (!r.ok) {
            row["error"] = r.error;
        } else {
            row["converged"] = r.converged;
            row["iterations"] = r.iterations;
            row["energy"] = r.energy;
            row["residual_norm"] = r.residual_norm;
            row["total_length"] = r.total_length;
            row["total_area"] = r.total_area;
            row["measure"] = {{"total", r.measure.total},
                              {"mean", r.measure.mean},
                              {"stddev", r.measure.stddev},
                              {"cv", r.measure.coefficient_of_variation},
                              {"min", r.measure.min},
                              {"max", r.measure.max},
                              {"histogram", r.measure.histogram}};
            row["coords"] = vector_to_json(r.coords);
        }
        out.push_back(std::move(row));
    }
    return {{"mode", "compare"}, {"seed", seed}, {"rows", std::move(out)}};
}

StateFile state_file_from_json(const json& j)
{
    StateFile s;
    if (!j.contains("model")) throw LoadError("state file has no embedded model");
    s.model = model_from_json(j.at("model"));
    const DofMap dofs = build_dof_map(s.model);
    s.coords = j.contains("coords") ? vector_from_json(j.at("coords")) : model_coordinates(s.model, dofs);
    if (s.coords.size() != dofs.size()) throw LoadError("state coordinates do not match the model");
    if (j.contains("forces")) {
        s.forces = forces_from_json(j.at("forces"));
        s.has_forces = s.forces.member_forces.size() == s.model.members.size() &&
                       s.forces.element_stresses.size() == s.model.elements.size();
    }
    return s;
}

void export_obj(const Model& model, const std::vector<Vec3>& positions, std::ostream& out)
{
    out << std::setprecision(9);
    out << "# tensiform export: " << positions.size() << " vertices, " << model.members.size() << " lines, "
        << model.elements.size() << " faces\n";
    for (const auto& p : positions) out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    for (const auto& m : model.members) out << "l " << m.endpoints[0] + 1 << ' ' << m.endpoints[1] + 1 << '\n';
    for (const auto& e : model.elements)
        out << "f " << e.vertices[0] + 1 << ' ' << e.vertices[1] + 1 << ' ' << e.vertices[2] + 1 << '\n';
}

void export_obj(const Model& model, const std::vector<Vec3>& positions, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    export_obj(model, positions, out);
}

ForceReport make_force_report(const Model& model, const DofMap& dofs, const Coordinates& coords,
                              const GeneralizedForces& forces)
{
    const auto pos = node_positions(model, dofs, coords);
    const auto eq = equilibrium_residual(model, dofs, coords, forces);
    const auto struts = model.strut_ids();
    std::vector<int> strut_index(model.members.size(), -1);
    for (std::size_t i = 0; i < struts.size(); ++i) strut_index[struts[i]] = static_cast<int>(i);

    ForceReport report;
    report.residual_inf = eq.inf_norm;
    report.residual_relative = eq.relative_norm;
    for (const auto& m : model.members) {
        ReportRow row;
        row.member_id = m.id;
        row.role = m.role;
        row.length = member_length(pos[m.endpoints[0]], pos[m.endpoints[1]]);
        if (m.role == MemberRole::Cable) {
            const double n = forces.member_forces[m.id];
            row.force = n;
            row.q = n / row.length;
            row.w2 = n / (2.0 * row.length);
            row.w4 = n / (4.0 * row.length * row.length * row.length);
        } else if (!forces.strut_multipliers.empty()) {
            row.lambda = forces.strut_multipliers[strut_index[m.id]];
            row.has_lambda = true;
        }
        report.rows.push_back(row);
    }
    return report;
}

void export_report_csv(const ForceReport& report, std::ostream& out)
{
    out << std::setprecision(17);
    out << kReportHeader << '\n';
    for (const auto& r : report.rows) {
        out << r.member_id << ',' << (r.role == MemberRole::Cable ? "cable" : "strut") << ',' << r.length << ',';
        if (r.role == MemberRole::Cable)
            out << r.force << ',' << r.q << ',' << r.w2 << ',' << r.w4 << ',';
        else
            out << ",,,,";
        if (r.has_lambda) out << r.lambda;
        out << '\n';
    }
    out << "# residual_inf," << report.residual_inf << '\n';
    out << "# residual_relative," << report.residual_relative << '\n';
}

void export_report_csv(const ForceReport& report, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    export_report_csv(report, out);
}

std::filesystem::path fixture_directory()
{
    if (const char* env = std::getenv("TENSIFORM_FIXTURES"); env && *env) return env;
    return TENSIFORM_FIXTURE_DIR;
}

std::vector<std::string> fixture_names()
{
    std::vector<std::string> names{"x_tensegrity", "simplex", "cuboctahedron", "ring", "net", "net220", "tanzbrunnen"};
    for (int c = 1; c <= 9; ++c) names.push_back("strut20_c" + std::to_string(c));
    return names;
}

Model make_fixture(const std::string& name, const json& params)
{
    const json p = params.is_null() ? json::object() : params;
    if (name == "x_tensegrity") {
        const auto w = get_or<std::array<double, 4>>(p, "weights", {1, 1, 1, 1});
        const auto l = get_or<std::array<double, 2>>(p, "lengths", {1, 1});
        return fixtures::make_x_tensegrity(w, l, get_or(p, "power", 4));
    }
    if (name == "simplex")
        return fixtures::make_simplex(get_or(p, "lbar", 10.0), get_or(p, "weight", 1.0), get_or(p, "power", 4));
    if (name.rfind("strut20", 0) == 0) {
        int connection = get_or(p, "connection", 1);
        if (name.size() > 9 && name.compare(0, 9, "strut20_c") == 0) connection = std::stoi(name.substr(9));
        return fixtures::make_strut20(connection, get_or(p, "w1", 1.0), get_or(p, "w2", 2.0), get_or(p, "lbar", 10.0));
    }
    if (name == "cuboctahedron")
        return fixtures::make_cuboctahedron_membrane(get_or(p, "cable_weight", 2.0), get_or(p, "membrane_weight", 1.0),
                                                     get_or(p, "lbar", 10.0));
    if (name == "ring") {
        const std::string f = get_or<std::string>(p, "functional", "S2");
        ElementFunctional membrane = PowerArea{1.0, 2};
        if (f == "S") membrane = PlainArea{};
        else if (f != "S2") throw std::invalid_argument("ring functional must be S or S2");
        return fixtures::make_ring_membrane(get_or(p, "h", 4.0), get_or(p, "axial", 12), get_or(p, "hoop", 32),
                                            get_or(p, "radius", 5.0), membrane);
    }
    if (name == "net") return fixtures::make_net(get_or(p, "rows", 10), get_or(p, "cols", 10));
    if (name == "net220" || name == "tanzbrunnen") return load_model(fixture_directory() / (name + ".json"));
    throw std::invalid_argument("unknown fixture '" + name + "'");
}

}  // namespace tensiform::io
