#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tensiform/analysis.hpp"
#include "tensiform/linear_fdm.hpp"
#include "tensiform/model.hpp"
#include "tensiform/optimizer.hpp"

namespace tensiform::io {

using nlohmann::json;

inline constexpr const char* kFormatVersion = "tensiform/1";

/// Malformed syntax, unknown version or variant, or a model that fails validate().
/// `problems` lists every issue found.
class LoadError : public std::runtime_error {
public:
    LoadError(const std::string& what, std::vector<std::string> problems = {})
        : std::runtime_error(what), problems_(std::move(problems))
    {
    }
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

// Model files ---------------------------------------------------------------

json model_to_json(const Model& model);
Model model_from_json(const json& j);
Model parse_model(std::string_view text);
Model load_model(const std::filesystem::path& path);
void save_model(const Model& model, const std::filesystem::path& path);

json functional_to_json(const ElementFunctional& f);
ElementFunctional functional_from_json(const json& j);

// Solver options and results -----------------------------------------------

SolveOptions options_from_json(const json& j);
json options_to_json(const SolveOptions& options);

json null_space_to_json(const NullSpaceReport& report);
json forces_to_json(const GeneralizedForces& forces);
GeneralizedForces forces_from_json(const json& j);

/// SolveResult body for one constrained minimization.
json state_to_json(const Model& model, const ConvergedState& state, std::uint64_t seed);
json linear_to_json(const Model& model, const LinearSolution& solution, const std::vector<double>& q);
json comparison_to_json(const std::vector<ComparisonRow>& rows, std::uint64_t seed);

/// A state file: a SolveResult with the model embedded under "model".
struct StateFile {
    Model model;
    Coordinates coords;
    GeneralizedForces forces;
    bool has_forces = false;
};
StateFile state_file_from_json(const json& j);

// Exports -------------------------------------------------------------------

/// Wavefront OBJ: v per node in id order, l per member, f per triangle, 1-based,
/// 9 significant digits.
void export_obj(const Model& model, const std::vector<Vec3>& positions, std::ostream& out);
void export_obj(const Model& model, const std::vector<Vec3>& positions, const std::filesystem::path& path);

struct ReportRow {
    int member_id = 0;
    MemberRole role = MemberRole::Cable;
    double length = 0.0;
    double force = 0.0;    // cables only
    double q = 0.0;        // cables only
    double w2 = 0.0;       // cables only
    double w4 = 0.0;       // cables only
    double lambda = 0.0;   // struts only
    bool has_lambda = false;
};

struct ForceReport {
    std::vector<ReportRow> rows;
    double residual_inf = 0.0;
    double residual_relative = 0.0;
};

inline constexpr const char* kReportHeader = "member_id,role,L,n,q,w2,w4,lambda";

ForceReport make_force_report(const Model& model, const DofMap& dofs, const Coordinates& coords,
                              const GeneralizedForces& forces);
void export_report_csv(const ForceReport& report, std::ostream& out);
void export_report_csv(const ForceReport& report, const std::filesystem::path& path);

// Fixtures ------------------------------------------------------------------

/// Directory holding stored fixture files (TENSIFORM_FIXTURES overrides the built-in path).
std::filesystem::path fixture_directory();
std::vector<std::string> fixture_names();
/// Builds or loads a named fixture. `params` may override generator parameters.
Model make_fixture(const std::string& name, const json& params = json::object());

}  // namespace tensiform::io
