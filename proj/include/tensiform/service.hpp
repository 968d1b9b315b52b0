#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tensiform/io.hpp"

namespace httplib {
class Server;
}

namespace tensiform::service {

using io::json;

struct Response {
    int status = 200;
    json body;
};

/// Server-side wall-clock cap for one solve, in seconds.
inline constexpr double kDefaultTimeCap = 60.0;

/// "L<p>" -> PowerLength(1, p), "S" -> PlainArea, "S<p>" -> PowerArea(1, p),
/// "spring:<k>:<rest>" -> SpringLength. Throws std::invalid_argument.
ElementFunctional parse_functional_spec(const std::string& spec);

/// Accepts either a spec string or a functional JSON object.
ElementFunctional functional_from_request(const json& j);

/// Request: {model, mode: linear|formfind|compare, options, q, functionals}.
/// The result echoes mode and seed. 400 invalid input or singular system,
/// 422 non-convergence, 500 internal.
Response handle_solve(const json& request, double time_cap = kDefaultTimeCap);

/// Request: {model, options, seeds: [..] | count: N}. Per-seed energies and states.
Response handle_batch(const json& request, double time_cap = kDefaultTimeCap);

Response handle_fixture_list();
Response handle_fixture(const std::string& name, const json& params = json::object());
Response handle_health();

/// Port from TENSIFORM_PORT when set, otherwise `fallback`.
int resolve_port(int fallback);

/// Installs the API routes and CORS headers on `server`.
void mount_routes(httplib::Server& server);

/// Blocks serving the HTTP API. Returns nonzero if the port cannot be bound.
int serve(const std::string& host, int port);

}  // namespace tensiform::service
