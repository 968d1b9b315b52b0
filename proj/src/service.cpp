#include "tensiform/service.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>

#include <httplib.h>

#include "tensiform/geometry.hpp"

namespace tensiform::service {

namespace {

Response error(int status, const std::string& message, json extra = json::object())
{
    extra["error"] = message;
    return {status, std::move(extra)};
}

SolveOptions capped_options(const json& request, double time_cap)
{
    SolveOptions o = io::options_from_json(request.value("options", json::object()));
    if (time_cap > 0.0) o.max_seconds = o.max_seconds > 0.0 ? std::min(o.max_seconds, time_cap) : time_cap;
    check_options(o);
    return o;
}

Response load_error(const io::LoadError& e)
{
    return error(400, e.what(), {{"problems", e.problems()}});
}

Response solve_linear(const Model& model, const json& request)
{
    std::vector<double> q = default_force_densities(model);
    if (auto it = request.find("q"); it != request.end() && !it->is_null()) {
        q = it->get<std::vector<double>>();
        if (q.size() != model.members.size())
            return error(400, "q must have one entry per member (" + std::to_string(model.members.size()) + ")");
    }
    try {
        const LinearSolution sol = solve_linear_fdm(model, q);
        return {200, io::linear_to_json(model, sol, q)};
    } catch (const SingularSystem& e) {
        return error(400, e.what(), {{"mode", "linear"}, {"null_space", io::null_space_to_json(e.report())}});
    }
}

Response solve_formfind(const Model& model, const SolveOptions& options)
{
    const ConvergedState state = minimize_constrained(model, options);
    json body = io::state_to_json(model, state, options.seed);
    return {state.converged ? 200 : 422, std::move(body)};
}

Response solve_compare(const Model& model, const json& request, const SolveOptions& options)
{
    std::vector<ElementFunctional> functionals;
    for (const auto& f : request.value("functionals", json::array())) functionals.push_back(functional_from_request(f));
    if (functionals.empty()) return error(400, "compare needs a non-empty functionals list");
    const auto rows = compare_functionals(model, functionals, options);
    return {200, io::comparison_to_json(rows, options.seed)};
}

}  // namespace

ElementFunctional parse_functional_spec(const std::string& spec)
{
    auto power = [&](std::size_t from) {
        std::size_t used = 0;
        const int p = std::stoi(spec.substr(from), &used);
        if (from + used != spec.size()) throw std::invalid_argument("bad functional '" + spec + "'");
        return p;
    };
    try {
        if (spec == "S") return PlainArea{};
        if (spec.size() > 1 && spec[0] == 'L') return PowerLength{1.0, power(1)};
        if (spec.size() > 1 && spec[0] == 'S') return PowerArea{1.0, power(1)};
        if (spec.rfind("spring:", 0) == 0) {
            const auto colon = spec.find(':', 7);
            if (colon == std::string::npos) throw std::invalid_argument("spring needs k and rest length");
            return SpringLength{std::stod(spec.substr(7, colon - 7)), std::stod(spec.substr(colon + 1))};
        }
    } catch (const std::logic_error&) {
    }
    throw std::invalid_argument("unknown functional '" + spec + "' (use L<p>, S, S<p> or spring:<k>:<rest>)");
}

ElementFunctional functional_from_request(const json& j)
{
    if (j.is_string()) return parse_functional_spec(j.get<std::string>());
    return io::functional_from_json(j);
}

Response handle_solve(const json& request, double time_cap)
{
    if (!request.is_object()) return error(400, "request must be a JSON object");
    const std::string mode = request.value("mode", "formfind");
    try {
        const Model model = io::model_from_json(request.at("model"));
        build_dof_map(model);
        const SolveOptions options = capped_options(request, time_cap);
        Response r;
        if (mode == "linear")
            r = solve_linear(model, request);
        else if (mode == "formfind")
            r = solve_formfind(model, options);
        else if (mode == "compare")
            r = solve_compare(model, request, options);
        else
            return error(400, "unknown mode '" + mode + "'");
        r.body["mode"] = mode;
        r.body["seed"] = options.seed;
        return r;
    } catch (const io::LoadError& e) {
        return load_error(e);
    } catch (const ModelError& e) {
        return error(400, e.what());
    } catch (const DegenerateGeometry& e) {
        return error(400, e.what());
    } catch (const json::exception& e) {
        return error(400, std::string("malformed request: ") + e.what());
    } catch (const std::invalid_argument& e) {
        return error(400, e.what());
    } catch (const std::exception& e) {
        return error(500, e.what());
    }
}

Response handle_batch(const json& request, double time_cap)
{
    if (!request.is_object()) return error(400, "request must be a JSON object");
    try {
        const Model model = io::model_from_json(request.at("model"));
        build_dof_map(model);
        const SolveOptions options = capped_options(request, time_cap);
        std::vector<std::uint64_t> seeds;
        if (auto it = request.find("seeds"); it != request.end()) {
            seeds = it->get<std::vector<std::uint64_t>>();
        } else {
            const int count = request.value("count", 20);
            if (count <= 0) return error(400, "count must be positive");
            for (int i = 0; i < count; ++i) seeds.push_back(options.seed + static_cast<std::uint64_t>(i));
        }
        if (seeds.empty()) return error(400, "no seeds given");
        const auto states = minimize_batch(model, options, seeds);
        json energies = json::array();
        json results = json::array();
        int converged = 0;
        for (std::size_t i = 0; i < states.size(); ++i) {
            energies.push_back(states[i].energy);
            results.push_back(io::state_to_json(model, states[i], seeds[i]));
            converged += states[i].converged ? 1 : 0;
        }
        return {200,
                {{"mode", "batch"},
                 {"seeds", seeds},
                 {"energies", energies},
                 {"converged_count", converged},
                 {"states", std::move(results)}}};
    } catch (const io::LoadError& e) {
        return load_error(e);
    } catch (const ModelError& e) {
        return error(400, e.what());
    } catch (const json::exception& e) {
        return error(400, std::string("malformed request: ") + e.what());
    } catch (const std::invalid_argument& e) {
        return error(400, e.what());
    } catch (const std::exception& e) {
        return error(500, e.what());
    }
}

Response handle_fixture_list() { return {200, {{"fixtures", io::fixture_names()}}}; }

Response handle_fixture(const std::string& name, const json& params)
{
    try {
        return {200, io::model_to_json(io::make_fixture(name, params))};
    } catch (const io::LoadError& e) {
        return error(500, e.what());
    } catch (const std::invalid_argument& e) {
        return error(404, e.what());
    } catch (const std::exception& e) {
        return error(500, e.what());
    }
}

Response handle_health() { return {200, {{"status", "ok"}, {"version", io::kFormatVersion}}}; }

int resolve_port(int fallback)
{
    if (const char* env = std::getenv("TENSIFORM_PORT"); env && *env) {
        try {
            return std::stoi(env);
        } catch (const std::exception&) {
            std::cerr << "ignoring invalid TENSIFORM_PORT '" << env << "'\n";
        }
    }
    return fallback;
}

void mount_routes(httplib::Server& server)
{
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});

    auto reply = [](httplib::Response& res, const Response& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    auto parse = [](const httplib::Request& req, json& out) {
        out = json::parse(req.body, nullptr, false);
        return !out.is_discarded();
    };

    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Get("/healthz", [=](const httplib::Request&, httplib::Response& res) { reply(res, handle_health()); });
    server.Get("/api/fixtures", [=](const httplib::Request&, httplib::Response& res) {
        reply(res, handle_fixture_list());
    });
    server.Get(R"(/api/fixtures/([A-Za-z0-9_.\-]+))", [=](const httplib::Request& req, httplib::Response& res) {
        json params = json::object();
        for (const auto& [key, value] : req.params) {
            json v = json::parse(value, nullptr, false);
            params[key] = v.is_discarded() ? json(value) : v;
        }
        reply(res, handle_fixture(req.matches[1], params));
    });
    server.Post("/api/solve", [=](const httplib::Request& req, httplib::Response& res) {
        json body;
        reply(res, parse(req, body) ? handle_solve(body) : error(400, "request body is not valid JSON"));
    });
    server.Post("/api/solve/batch", [=](const httplib::Request& req, httplib::Response& res) {
        json body;
        reply(res, parse(req, body) ? handle_batch(body) : error(400, "request body is not valid JSON"));
    });
}

int serve(const std::string& host, int port)
{
    httplib::Server server;
    mount_routes(server);
    std::cerr << "tensiform listening on " << host << ':' << port << '\n';
    return server.listen(host, port) ? 0 : 1;
}

}  // namespace tensiform::service
