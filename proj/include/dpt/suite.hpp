#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpt/field.hpp"
#include "dpt/inequalities.hpp"
#include "dpt/report.hpp"

namespace dpt {

struct JobSpec {
  std::string name;  // defaults to module.operation
  std::string module;
  std::string operation;
  nlohmann::json parameters = nlohmann::json::object();
  std::optional<std::vector<int>> grid;
  Tolerance tolerance;
  std::uint64_t seed = 0;
};

enum class ReportFormat { Json, Csv };

struct SuiteConfig {
  std::vector<JobSpec> jobs;
  std::string output;
  ReportFormat format = ReportFormat::Json;
};

// Strict parse: unknown keys, unknown operations and a missing job list are errors.
SuiteConfig parse_config(const std::string& text, std::uint64_t default_seed = 0);

std::vector<std::string> known_operations();  // "module.operation"
bool is_known_operation(const std::string& module, const std::string& operation);

CheckReport run_job(const JobSpec& job);
// Reports in declaration order; job errors become failing reports.
std::vector<CheckReport> run_suite(const SuiteConfig& config, int threads = 1);
bool all_pass(const std::vector<CheckReport>& reports);

std::string emit_report(const std::vector<CheckReport>& reports, ReportFormat format);
std::vector<CheckReport> reports_from_json(const std::string& text);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
ReportFormat parse_format(const std::string& s);

}  // namespace dpt
