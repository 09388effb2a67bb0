#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qalloc/allocation.hpp"
#include "qalloc/equitability.hpp"
#include "qalloc/incompatibility.hpp"

namespace qalloc::cli {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kVerificationFailed = 1;
inline constexpr int kSchema = 2;
inline constexpr int kDomain = 3;
inline constexpr int kInfeasible = 4;
inline constexpr int kCapExceeded = 5;
}  // namespace exit_code

/// Problem file violation; path is a JSON pointer to the offending field.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class Format { Json, Csv, Text };

struct Flags {
  std::optional<std::string> out;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  Format format = Format::Json;
};

// ---------------------------------------------------------------------------
// Problem files

json load_problem_file(const std::string& path);
/// Checks schema_version and kind; returns the kind.
std::string check_header(const json& doc);

struct AllocationProblem {
  Hypergraph hypergraph;
  std::size_t d = 2;
  std::optional<Priors> priors;
  std::vector<std::string> criteria;
};

struct RobustnessProblem {
  Assembly assembly;
  RobustnessOptions options;
  /// Dimension for the closed-form comparison when the assembly is an
  /// undepolarized (product) MUB pair.
  std::optional<double> closed_form_dim;
};

struct BellVerifyProblem {
  std::size_t trials = 100;
  std::optional<std::uint64_t> seed;
  std::string projectors = "random";
};

AllocationProblem parse_allocation(const json& doc);
KnapsackProblem parse_equitable(const json& doc);
RobustnessProblem parse_robustness(const json& doc);
BellVerifyProblem parse_bell_verify(const json& doc);

// ---------------------------------------------------------------------------
// Commands

struct Report {
  std::string command;
  json inputs;
  json results;
  json provenance;
  double wall_time_s = 0.0;
  int exit_code = exit_code::kOk;
  /// Rows for CSV/text output; first row is the header.
  std::vector<std::vector<std::string>> table;

  /// Everything except the wall time; stable across identical runs.
  json payload() const;
  json to_json() const;
};

Report cmd_allocate(const json& doc, const Flags& flags,
                    const std::optional<std::string>& criterion = std::nullopt);
Report cmd_equitable(const json& doc, const Flags& flags);
Report cmd_robustness(const json& doc, const Flags& flags);
Report cmd_bell_verify(const BellVerifyProblem& problem, const Flags& flags);

std::string render(const Report& report, Format format);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qalloc::cli
