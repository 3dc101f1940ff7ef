#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adiascat/config.hpp"

namespace adiascat {

inline constexpr const char* kCsvHeader =
    "experiment,omega,eps,s,e,j,jp,value_exact_re,value_exact_im,value_approx_re,value_approx_im,abs_error,"
    "predicted_bound,wall_ms";

/// One results.csv line; unset fields are written empty.
struct CsvRow {
  std::string experiment;
  std::optional<double> omega;
  std::optional<double> eps;
  std::optional<double> s;
  std::optional<double> e;
  std::optional<int> j;
  std::optional<int> jp;
  std::optional<cplx> exact;
  std::optional<cplx> approx;
  std::optional<double> abs_error;
  std::optional<double> predicted_bound;
};

/// Pass/fail of one acceptance criterion; `id` matches the criterion number.
struct CriterionResult {
  std::string id;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

enum class RunStatus { ok = 0, validation_error = 1, numerical_error = 2 };

struct RunResult {
  ExperimentConfig config;
  RunStatus status = RunStatus::ok;
  std::vector<CsvRow> rows;
  std::vector<CriterionResult> criteria;
  std::map<std::string, double> slopes;
  std::vector<Diagnostic> diagnostics;
  double wall_ms = 0.0;

  bool all_pass() const;
  const CriterionResult* find(const std::string& id) const;
};

/// Validates, then runs the experiment in deterministic sweep order. Errors
/// are caught and turned into a status plus diagnostics.
RunResult execute(const ExperimentConfig& config);

std::string csv_text(const std::vector<CsvRow>& rows);
std::string summary_json(const RunResult& result);

/// execute() and write results.csv, summary.json and config.ini into `out_dir`.
RunResult run_to_directory(const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace adiascat
