#include "tensiform/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tensiform/io.hpp"
#include "tensiform/service.hpp"

namespace tensiform {

namespace {

using io::json;

constexpr int kExitOk = 0;
constexpr int kExitNoConvergence = 1;
constexpr int kExitInput = 2;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw InputError(path + ": syntax error");
    return j;
}

void emit(const json& j, const std::string& path, std::ostream& out)
{
    if (path.empty()) {
        out << j.dump(1) << '\n';
        return;
    }
    std::ofstream file(path);
    if (!file) throw InputError("cannot write " + path);
    file << j.dump(1) << '\n';
}

int exit_code(int status)
{
    if (status == 200) return kExitOk;
    if (status == 422 || status >= 500) return kExitNoConvergence;
    return kExitInput;
}

void report_failure(const service::Response& r, std::ostream& err)
{
    if (r.status == 200) return;
    if (r.body.contains("error")) err << "error: " << r.body["error"].get<std::string>() << '\n';
    if (r.body.contains("problems"))
        for (const auto& p : r.body["problems"]) err << "  " << p.get<std::string>() << '\n';
    if (r.body.contains("null_space")) {
        const auto& ns = r.body["null_space"];
        err << "null space: rank " << ns["rank"] << ", nullity " << ns["nullity"] << '\n';
        for (const auto& v : ns["basis"]) err << "  " << v.dump() << '\n';
    }
    if (r.status == 422) {
        err << "not converged after " << r.body.value("iterations", 0) << " iterations, residual "
            << r.body.value("residual_norm", 0.0) << '\n';
        for (const auto& e : r.body.value("events", json::array())) err << "  " << e.get<std::string>() << '\n';
    }
}

json parse_param_value(const std::string& text)
{
    json v = json::parse(text, nullptr, false);
    return v.is_discarded() ? json(text) : v;
}

}  // namespace

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Form-finding for prestressed cable, membrane and strut structures", "tensiform"};
    app.require_subcommand(1);

    std::string model_path, out_path, q_path, state_path, obj_path, csv_path, method = "descent", init = "random",
                                                                              functionals, fixture_name;
    std::uint64_t seed = 0;
    int seeds = 1, max_iter = SolveOptions{}.max_iterations, port = 8080;
    double tol = SolveOptions{}.gradient_tolerance, range = RandomInit{}.range, jitter = 0.0;
    std::vector<std::string> params;
    std::string host = "127.0.0.1";

    auto* linear = app.add_subcommand("solve-linear", "Solve the linear force density system");
    linear->add_option("model", model_path, "Model file")->required();
    linear->add_option("--q-file", q_path, "JSON array of force densities, one per member");
    linear->add_option("--out", out_path, "Write the result here instead of stdout");

    auto add_solver_flags = [&](CLI::App* sub) {
        sub->add_option("model", model_path, "Model file")->required();
        sub->add_option("--seed", seed, "Random seed");
        sub->add_option("--tol", tol, "Gradient tolerance");
        sub->add_option("--max-iter", max_iter, "Iteration limit");
        sub->add_option("--method", method, "descent or dynrelax")->check(CLI::IsMember({"descent", "dynrelax"}));
        sub->add_option("--init", init, "random or model")->check(CLI::IsMember({"random", "model"}));
        sub->add_option("--range", range, "Half-width of the random initialization");
        sub->add_option("--jitter", jitter, "Relative jitter for --init model");
        sub->add_option("--out", out_path, "Write the result here instead of stdout");
    };

    auto* formfind = app.add_subcommand("form-find", "Minimize the element energy under strut constraints");
    add_solver_flags(formfind);
    formfind->add_option("--seeds", seeds, "Run this many consecutive seeds")->check(CLI::PositiveNumber);
    formfind->add_option("--obj", obj_path, "Also export the geometry as OBJ");
    formfind->add_option("--csv", csv_path, "Also export the force report as CSV");

    auto* compare = app.add_subcommand("compare", "Solve once per functional and tabulate");
    add_solver_flags(compare);
    compare->add_option("--functionals", functionals, "Comma separated: L<p>, S, S<p>, spring:<k>:<rest>")
        ->required();

    auto* fixture = app.add_subcommand("fixture", "Emit a built-in model");
    fixture->add_option("name", fixture_name, "Fixture name (see --list)");
    fixture->add_option("params", params, "key=value overrides");
    fixture->add_option("--out", out_path, "Write the model here instead of stdout");
    bool list = false;
    fixture->add_flag("--list", list, "List fixture names");

    auto* exporter = app.add_subcommand("export", "Export a state file");
    exporter->add_option("state", state_path, "State file written by form-find")->required();
    exporter->add_option("--obj", obj_path, "OBJ output path");
    exporter->add_option("--csv", csv_path, "CSV force report path");

    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    serve->add_option("--port", port, "Port (TENSIFORM_PORT overrides)");
    serve->add_option("--host", host, "Bind address");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    auto options_json = [&] {
        json o{{"seed", seed}, {"gradient_tolerance", tol}, {"max_iterations", max_iter}, {"method", method}};
        o["init"] = init == "model" ? json{{"kind", "model"}, {"jitter", jitter}} : json{{"kind", "random"}, {"range", range}};
        return o;
    };

    try {
        if (*linear) {
            json request{{"mode", "linear"}, {"model", read_json(model_path)}};
            if (!q_path.empty()) request["q"] = read_json(q_path);
            const auto r = service::handle_solve(request, 0.0);
            report_failure(r, err);
            if (r.status == 200) emit(r.body, out_path, out);
            return exit_code(r.status);
        }

        if (*formfind) {
            const json model = read_json(model_path);
            if (seeds > 1) {
                const auto r = service::handle_batch({{"model", model}, {"options", options_json()}, {"count", seeds}}, 0.0);
                report_failure(r, err);
                if (r.status != 200) return exit_code(r.status);
                emit(r.body, out_path, out);
                err << r.body["converged_count"] << " of " << seeds << " seeds converged\n";
                return r.body["converged_count"].get<int>() > 0 ? kExitOk : kExitNoConvergence;
            }
            const auto r = service::handle_solve({{"mode", "formfind"}, {"model", model}, {"options", options_json()}}, 0.0);
            report_failure(r, err);
            if (r.status >= 400 && r.status != 422) return exit_code(r.status);
            json state = r.body;
            state["model"] = model;
            emit(state, out_path, out);
            if (!obj_path.empty() || !csv_path.empty()) {
                const auto file = io::state_file_from_json(state);
                const DofMap dofs = build_dof_map(file.model);
                if (!obj_path.empty()) io::export_obj(file.model, node_positions(file.model, dofs, file.coords), obj_path);
                if (!csv_path.empty())
                    io::export_report_csv(io::make_force_report(file.model, dofs, file.coords, file.forces), csv_path);
            }
            return exit_code(r.status);
        }

        if (*compare) {
            json list_json = json::array();
            std::stringstream ss(functionals);
            for (std::string item; std::getline(ss, item, ',');)
                if (!item.empty()) list_json.push_back(item);
            const auto r = service::handle_solve(
                {{"mode", "compare"}, {"model", read_json(model_path)}, {"options", options_json()}, {"functionals", list_json}},
                0.0);
            report_failure(r, err);
            if (r.status != 200) return exit_code(r.status);
            emit(r.body, out_path, out);
            for (const auto& row : r.body["rows"]) {
                err << row["label"].get<std::string>() << ": ";
                if (!row["ok"].get<bool>()) {
                    err << "error " << row["error"].get<std::string>() << '\n';
                    continue;
                }
                err << "energy " << row["energy"] << ", length " << row["total_length"] << ", area "
                    << row["total_area"] << ", cv " << row["measure"]["cv"]
                    << (row["converged"].get<bool>() ? "" : " (not converged)") << '\n';
            }
            return kExitOk;
        }

        if (*fixture) {
            if (list || fixture_name.empty()) {
                for (const auto& n : io::fixture_names()) out << n << '\n';
                return list ? kExitOk : kExitInput;
            }
            json p = json::object();
            for (const auto& kv : params) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw InputError("parameter '" + kv + "' is not key=value");
                p[kv.substr(0, eq)] = parse_param_value(kv.substr(eq + 1));
            }
            const auto r = service::handle_fixture(fixture_name, p);
            report_failure(r, err);
            if (r.status != 200) return kExitInput;
            emit(r.body, out_path, out);
            return kExitOk;
        }

        if (*exporter) {
            if (obj_path.empty() && csv_path.empty()) throw InputError("export needs --obj or --csv");
            const auto file = io::state_file_from_json(read_json(state_path));
            const DofMap dofs = build_dof_map(file.model);
            if (!obj_path.empty()) io::export_obj(file.model, node_positions(file.model, dofs, file.coords), obj_path);
            if (!csv_path.empty()) {
                if (!file.has_forces) throw InputError("state file carries no forces");
                io::export_report_csv(io::make_force_report(file.model, dofs, file.coords, file.forces), csv_path);
            }
            return kExitOk;
        }

        if (*serve) return service::serve(host, service::resolve_port(port)) == 0 ? kExitOk : kExitInput;
    } catch (const io::LoadError& e) {
        err << "error: " << e.what() << '\n';
        for (const auto& p : e.problems()) err << "  " << p << '\n';
        return kExitInput;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}

}  // namespace tensiform
