#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dpt/constructors.hpp"
#include "dpt/errors.hpp"
#include "dpt/log.hpp"
#include "dpt/suite.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

const std::map<std::string, std::string> kModuleOf = {
    {"verify", "inequality_engine"}, {"prove", "transport_prover"},  {"fluid", "fluid_estimates"},
    {"kinetic", "kinetic_estimates"}, {"homog", "homogenization"},
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    dpt::write_text(path, text);
}

int construct(const Options& opt) {
  const auto spec = nlohmann::json::parse(dpt::read_text(opt.config));
  const dpt::TensorField field = dpt::build_field(spec);
  emit(dpt::to_json(field).dump() + "\n", opt.out);
  dpt::log_message(dpt::LogLevel::Info, "constructed " + std::to_string(field.size()) + " cells");
  return 0;
}

int run(const std::string& command, const Options& opt) {
  dpt::SuiteConfig cfg = dpt::parse_config(dpt::read_text(opt.config), opt.seed.value_or(0));
  if (const auto it = kModuleOf.find(command); it != kModuleOf.end())
    std::erase_if(cfg.jobs, [&](const dpt::JobSpec& j) { return j.module != it->second; });
  if (opt.format) cfg.format = dpt::parse_format(*opt.format);
  const auto reports = dpt::run_suite(cfg, opt.jobs);
  emit(dpt::emit_report(reports, cfg.format), opt.out.empty() ? cfg.output : opt.out);
  return dpt::all_pass(reports) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Determinant inequalities for positive symmetric tensors"};
  app.require_subcommand(1);
  Options opt;
  for (const char* name : {"construct", "verify", "prove", "fluid", "kinetic", "homog", "report"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config, "JSON input")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output file, stdout when omitted");
    sub->add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", opt.seed, "default seed for jobs without one");
    sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return command == "construct" ? construct(opt) : run(command, opt);
  } catch (const std::exception& e) {
    dpt::log_message(dpt::LogLevel::Error, e.what());
    return 2;
  }
}
