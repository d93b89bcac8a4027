#pragma once

// Command pipelines behind the spraylab tool.  Each command returns a JSON
// report with sorted keys plus an exit code: 0 when every requested check
// passes, 2 when checks ran and some failed.  Input errors throw InputError
// (exit code 1 at the tool level).

#include "spraylab/geodesics.hpp"
#include "spraylab/metrizability.hpp"
#include "spraylab/spray.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spraylab {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportVersion = 1;

class InputError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct SprayDefinition
{
    std::string name;
    std::string description;
    int dim = 0;
    std::vector<std::string> G;
    std::optional<std::string> F;
    std::optional<std::vector<std::string>> theta;
    std::string digest; // fnv1a64 of the canonical source

    Spray spray;
    std::optional<Expression> finsler;
};

/// {"dim", "G", "F"?, "theta"?, "name"?, "description"?}
SprayDefinition definition_from_json(const nlohmann::json& j);
SprayDefinition definition_from_file(const std::string& path);
SprayDefinition definition_from_preset(const std::string& name);
/// A readable file path, otherwise a preset name.
SprayDefinition definition_from_source(const std::string& source);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a64(std::string_view data);

struct RunOptions
{
    std::uint64_t seed = 42;
    int samples = 50;
    double tol = 1e-9;
};

struct CommandResult
{
    nlohmann::json report;
    int exit_code = 0;
};

CommandResult cmd_analyze(const SprayDefinition& def, const RunOptions& opt);

/// Candidate precedence: finsler, theta, then the definition's F and theta.
struct MetrizableOptions
{
    std::optional<std::string> finsler;
    std::optional<std::vector<std::string>> theta;
};

CommandResult cmd_metrizable(const SprayDefinition& def, const RunOptions& opt, const MetrizableOptions& m = {});

CommandResult cmd_involutivity(const SprayDefinition& def, const RunOptions& opt, int n_points = 10);

struct GeodesicOptions
{
    std::vector<double> x0;   // default: origin
    std::vector<double> y0;   // default: first unit vector
    double T = 1.0;
    int steps = 1000;
    std::optional<SprayDefinition> compare;
};

struct GeodesicResult : CommandResult
{
    GeodesicTrace trace;
    std::optional<GeodesicTrace> compare_trace;
};

GeodesicResult cmd_geodesics(const SprayDefinition& def, const RunOptions& opt, const GeodesicOptions& g);

nlohmann::json to_json(const ZeroVerdict& v);
nlohmann::json to_json(const Point& p);
nlohmann::json to_json(const GeodesicTrace& trace);

/// Indented key: value rendering of a report.
std::string to_text(const nlohmann::json& report);

} // namespace spraylab
