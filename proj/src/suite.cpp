#include "dpt/suite.hpp"

#include <atomic>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "dpt/constructors.hpp"
#include "dpt/errors.hpp"
#include "dpt/fluid.hpp"
#include "dpt/homogenization.hpp"
#include "dpt/kinetic.hpp"
#include "dpt/log.hpp"
#include "dpt/numerics.hpp"
#include "dpt/transport.hpp"

namespace dpt {

using nlohmann::json;

namespace {

using Runner = std::function<CheckReport(const JobSpec&)>;

const json& param(const JobSpec& job, const char* key) {
  if (!job.parameters.contains(key)) fail(ErrorKind::ParseError, job.name + ": missing parameter '" + key + "'");
  return job.parameters.at(key);
}

TensorField field_param(const JobSpec& job) { return build_field(param(job, "field")); }

GridSpec grid_param(const JobSpec& job) { return GridSpec{param(job, "grid").get<std::vector<int>>()}; }

std::vector<VelocityAtom> atoms_from_json(const json& j) {
  std::vector<VelocityAtom> atoms;
  for (const auto& a : j) {
    check_keys(a, {"velocity", "weight", "density"}, "atom");
    atoms.push_back({vector_from_json(a.at("velocity")), a.value("weight", 1.0), a.at("density").get<double>()});
  }
  return atoms;
}

CheckReport homog_job(const JobSpec& job, HomogMode mode) {
  check_keys(job.parameters, {"field", "budget"}, job.name);
  HomogCheckOptions opts;
  opts.seed = job.seed;
  opts.budget = job.parameters.value("budget", opts.budget);
  return homog_checks(field_param(job), mode, opts);
}

const std::map<std::string, Runner>& registry() {
  static const std::map<std::string, Runner> ops = {
      {"inequality_engine.verify_periodic",
       [](const JobSpec& job) {
         check_keys(job.parameters, {"field", "laminate"}, job.name);
         if (job.parameters.contains("laminate")) {
           const json& l = job.parameters.at("laminate");
           check_keys(l, {"b", "c", "xi", "theta"}, "laminate");
           return verify_periodic(LaminateSpec::with_fraction(sym_from_json(l.at("b")), sym_from_json(l.at("c")),
                                                              vector_from_json(l.at("xi")), l.at("theta").get<double>()),
                                  job.tolerance);
         }
         return verify_periodic(field_param(job), job.tolerance);
       }},
      {"inequality_engine.verify_convex",
       [](const JobSpec& job) {
         check_keys(job.parameters, {"field", "include_measure"}, job.name);
         return verify_convex(field_param(job), job.parameters.value("include_measure", false), job.tolerance);
       }},
      {"inequality_engine.gagliardo",
       [](const JobSpec& job) {
         check_keys(job.parameters, {"entries", "grid"}, job.name);
         DiagonalSpec spec;
         for (const auto& e : param(job, "entries")) spec.entries.push_back(trig_from_json(e));
         const int d = static_cast<int>(spec.entries.size());
         return gagliardo_check(spec, make_mesh(Torus::unit(d), grid_param(job)), job.tolerance);
       }},
      {"inequality_engine.concavity",
       [](const JobSpec& job) {
         check_keys(job.parameters, {"d", "alpha", "count", "samples"}, job.name);
         return concavity_sweep(param(job, "d").get<int>(), param(job, "alpha").get<double>(),
                                job.parameters.value("count", 50), job.seed, job.parameters.value("samples", 65));
       }},
      {"inequality_engine.compact_support_mean",
       [](const JobSpec& job) {
         check_keys(job.parameters, {"field", "abar", "margin", "support_tol"}, job.name);
         return compact_support_mean(field_param(job), sym_from_json(param(job, "abar")),
                                     job.parameters.value("margin", 2), job.parameters.value("support_tol", 1e-2),
                                     job.tolerance);
       }},
      {"inequality_engine.vanishing_trace",
       [](const JobSpec& job) {
         check_keys(job.parameters, {"field", "trace_eps", "div_constant"}, job.name);
         VanishingTraceOptions opts;
         opts.trace_eps = job.parameters.value("trace_eps", opts.trace_eps);
         opts.div_constant = job.parameters.value("div_constant", opts.div_constant);
         return vanishing_trace_check(field_param(job), opts);
       }},
      {"inequality_engine.isoperimetric",
       [](const JobSpec& job) {
         check_keys(job.parameters, {"set", "grid"}, job.name);
         return isoperimetric_check(domain_from_json(param(job, "set")), grid_param(job), job.tolerance);
       }},
      {"transport_prover.proof_trace",
       [](const JobSpec& job) {
         check_keys(job.parameters, {"field", "slack_tol"}, job.name);
         return proof_trace_periodic(field_param(job), {}, job.parameters.value("slack_tol", 1e-10)).report;
       }},
      {"transport_prover.nondiv_bound",
       [](const JobSpec& job) {
         check_keys(job.parameters, {"field"}, job.name);
         return nondiv_bound(field_param(job), job.tolerance);
       }},
      {"fluid_estimates.euler_bound",
       [](const JobSpec& job) {
         check_keys(job.parameters, {"initial", "t_end", "cfl"}, job.name);
         const FluidState init = fluid_from_json(param(job, "initial"));
         const auto traj = euler_run_1d(init, param(job, "t_end").get<double>(), job.parameters.value("cfl", 0.5));
         return euler_bound_check(traj, flow_invariants(init), job.tolerance);
       }},
      {"fluid_estimates.absfl_bound",
       [](const JobSpec& job) {
         check_keys(job.parameters, {"initial", "t_end", "cfl"}, job.name);
         const FluidState init = fluid_from_json(param(job, "initial"));
         const auto traj = euler_run_1d(init, param(job, "t_end").get<double>(), job.parameters.value("cfl", 0.5));
         return absfl_bound_check(traj.slab, job.tolerance);
       }},
      {"fluid_estimates.selfsimilar_bound",
       [](const JobSpec& job) {
         check_keys(job.parameters, {"radius", "grid", "rho", "p", "velocity_scale"}, job.name);
         const double radius = job.parameters.value("radius", 1.0);
         const GridSpec grid = grid_param(job);
         const int n = static_cast<int>(grid.shape.size());
         auto mesh = make_mesh(Ball{SmallVector::Zero(n), radius}, grid);
         ScalarField rho(mesh, param(job, "rho").get<double>()), p(mesh, param(job, "p").get<double>());
         VectorField v(mesh, n);
         const double s = job.parameters.value("velocity_scale", 1.0);
         for (std::size_t c = 0; c < mesh->size(); ++c)
           for (int i = 0; i < n; ++i) v.at(c)[i] = -s * mesh->center(c)[i];
         return selfsimilar_bound_check(rho, v, p, job.tolerance);
       }},
      {"fluid_estimates.relativistic_bound",
       [](const JobSpec& job) {
         check_keys(job.parameters, {"c", "a", "box", "grid", "density", "support", "speed", "t_end"}, job.name);
         auto mesh = make_mesh(domain_from_json(param(job, "box")), grid_param(job));
         const int n = mesh->dim();
         const double support = param(job, "support").get<double>(), speed = job.parameters.value("speed", 0.0);
         RelativisticHistory h;
         h.space = mesh;
         h.times = {0.0, param(job, "t_end").get<double>()};
         ScalarField rho(mesh);
         VectorField v(mesh, n);
         for (std::size_t c = 0; c < mesh->size(); ++c) {
           double r2 = 0.0;
           for (double x : mesh->center(c)) r2 += x * x;
           rho[c] = r2 < support * support ? param(job, "density").get<double>() : 0.0;
           v.at(c)[0] = speed;
         }
         h.rho = {rho};
         h.v = {v};
         return relativistic_bound_check(h, param(job, "c").get<double>(), param(job, "a").get<double>(),
                                         job.tolerance);
       }},
      {"kinetic_estimates.kinetic_bound",
       [](const JobSpec& job) {
         check_keys(job.parameters, {"initial", "t_end", "cfl"}, job.name);
         const KineticState init = kinetic_from_json(param(job, "initial"));
         const auto traj = bgk_run_1d(init, param(job, "t_end").get<double>(), job.parameters.value("cfl", 0.9));
         return kinetic_bound_check(traj, kinetic_invariants(init), job.tolerance);
       }},
      {"kinetic_estimates.andreiev",
       [](const JobSpec& job) {
         check_keys(job.parameters, {"atoms", "n", "budget", "monte_carlo", "samples_per_stratum"}, job.name);
         AndreievOptions opts;
         opts.budget = job.parameters.value("budget", opts.budget);
         opts.monte_carlo = job.parameters.value("monte_carlo", false);
         opts.samples_per_stratum = job.parameters.value("samples_per_stratum", opts.samples_per_stratum);
         if (job.seed != 0) opts.seed = job.seed;
         const auto r = andreiev_det(atoms_from_json(param(job, "atoms")), param(job, "n").get<int>(), opts);
         const double allowance = r.exhaustive ? 1e-12 * (1.0 + std::abs(r.direct)) : 5.0 * r.std_error;
         auto rep = make_report("andreiev", std::abs(r.direct - r.bruteforce), allowance, 0.0, 0.0,
                                r.exhaustive ? "exhaustive enumeration" : "stratified Monte Carlo, 5 sigma");
         rep.extras = {{"direct", r.direct}, {"bruteforce", r.bruteforce}, {"std_error", r.std_error},
                       {"seed", static_cast<double>(r.seed)}};
         return rep;
       }},
      {"kinetic_estimates.defect_schur",
       [](const JobSpec& job) {
         check_keys(job.parameters, {"rho", "m", "t", "sigma", "count"}, job.name);
         const DefectSample s{param(job, "rho").get<double>(), vector_from_json(param(job, "m")),
                              sym_from_json(param(job, "t")), sym_from_json(param(job, "sigma"))};
         return defect_schur_check(s, job.parameters.value("count", std::size_t{100000}), job.seed);
       }},
      {"homogenization.bounds", [](const JobSpec& job) { return homog_job(job, HomogMode::Bounds); }},
      {"homogenization.dpt_equivalence", [](const JobSpec& job) { return homog_job(job, HomogMode::DPTEquivalence); }},
      {"homogenization.tempt_falsifier", [](const JobSpec& job) { return homog_job(job, HomogMode::TemptFalsifier); }},
  };
  return ops;
}

std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

Tolerance tolerance_from_json(const json& j) {
  Tolerance t;
  if (j.is_number()) {
    t.base = j.get<double>();
    return t;
  }
  check_keys(j, {"base", "discretization"}, "tolerance");
  t.base = j.value("base", t.base);
  t.discretization = j.value("discretization", t.discretization);
  return t;
}

json number_json(double x) { return to_hexfloat(x); }

double number_from_json(const json& j) { return j.is_string() ? parse_hexfloat(j.get<std::string>()) : j.get<double>(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

ReportFormat parse_format(const std::string& s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  fail(ErrorKind::ParseError, "format must be json or csv, got '" + s + "'");
}

std::vector<std::string> known_operations() {
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

bool is_known_operation(const std::string& module, const std::string& operation) {
  return registry().contains(module + "." + operation);
}

SuiteConfig parse_config(const std::string& text, std::uint64_t default_seed) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ParseError, line_context(text, e.byte) + ": " + e.what());
  }
  require(j.is_object(), ErrorKind::ParseError, "config must be a JSON object");
  check_keys(j, {"jobs", "output", "format"}, "config");
  if (!j.contains("jobs")) fail(ErrorKind::MissingJobs, "config has no 'jobs' list");
  require(j.at("jobs").is_array(), ErrorKind::ParseError, "'jobs' must be an array");

  SuiteConfig cfg;
  cfg.output = j.value("output", "");
  if (j.contains("format")) cfg.format = parse_format(j.at("format").get<std::string>());
  std::size_t index = 0;
  for (const auto& jj : j.at("jobs")) {
    const std::string where = "jobs[" + std::to_string(index++) + "]";
    require(jj.is_object(), ErrorKind::ParseError, where + " must be an object");
    check_keys(jj, {"name", "module", "operation", "parameters", "grid", "tolerance", "seed"}, where);
    JobSpec job;
    try {
      job.module = jj.at("module").get<std::string>();
      job.operation = jj.at("operation").get<std::string>();
      job.name = jj.value("name", job.module + "." + job.operation);
      if (jj.contains("parameters")) job.parameters = jj.at("parameters");
      if (jj.contains("grid")) job.grid = jj.at("grid").get<std::vector<int>>();
      if (jj.contains("tolerance")) job.tolerance = tolerance_from_json(jj.at("tolerance"));
      job.seed = jj.value("seed", default_seed);
    } catch (const json::exception& e) {
      fail(ErrorKind::ParseError, where + ": " + e.what());
    }
    if (!is_known_operation(job.module, job.operation))
      fail(ErrorKind::UnknownOperation, where + ": no operation " + job.module + "." + job.operation);
    require(job.parameters.is_object(), ErrorKind::ParseError, where + ".parameters must be an object");
    if (job.grid) {
      if (job.parameters.contains("field") && job.parameters.at("field").is_object())
        job.parameters["field"]["grid"] = *job.grid;
      else
        job.parameters["grid"] = *job.grid;
    }
    cfg.jobs.push_back(std::move(job));
  }
  return cfg;
}

CheckReport run_job(const JobSpec& job) {
  log_message(LogLevel::Info, "running " + job.name);
  CheckReport r;
  try {
    const auto it = registry().find(job.module + "." + job.operation);
    if (it == registry().end()) fail(ErrorKind::UnknownOperation, job.module + "." + job.operation);
    r = it->second(job);
  } catch (const Error& e) {
    r = CheckReport{};
    r.notes = std::string("error: ") + e.what();
    log_message(LogLevel::Error, job.name + ": " + e.what());
  } catch (const std::exception& e) {
    r = CheckReport{};
    r.notes = std::string("error: ") + e.what();
    log_message(LogLevel::Error, job.name + ": " + e.what());
  }
  r.name = job.name;
  log_message(LogLevel::Debug, job.name + (r.pass ? " passed" : " failed"));
  return r;
}

std::vector<CheckReport> run_suite(const SuiteConfig& config, int threads) {
  std::vector<CheckReport> out(config.jobs.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, config.jobs.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < config.jobs.size(); k = next++) out[k] = run_job(config.jobs[k]);
  };
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  return out;
}

bool all_pass(const std::vector<CheckReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass; });
}

std::string emit_report(const std::vector<CheckReport>& reports, ReportFormat format) {
  if (format == ReportFormat::Csv) {
    std::ostringstream os;
    os.precision(17);
    os << "name,lhs,rhs,slack,pass,resolution,tolerance\n";
    for (const auto& r : reports)
      os << csv_field(r.name) << ',' << r.lhs << ',' << r.rhs << ',' << r.slack << ',' << (r.pass ? "true" : "false")
         << ',' << r.resolution << ',' << r.tolerance << '\n';
    return os.str();
  }
  json arr = json::array();
  for (const auto& r : reports) {
    json extras = json::object();
    for (const auto& [k, v] : r.extras) extras[k] = number_json(v);
    arr.push_back({{"name", r.name},
                   {"lhs", number_json(r.lhs)},
                   {"rhs", number_json(r.rhs)},
                   {"slack", number_json(r.slack)},
                   {"pass", r.pass},
                   {"applicable", r.applicable},
                   {"resolution", number_json(r.resolution)},
                   {"tolerance", number_json(r.tolerance)},
                   {"notes", r.notes},
                   {"extras", extras}});
  }
  return json{{"reports", arr}}.dump(2) + "\n";
}

std::vector<CheckReport> reports_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ParseError, line_context(text, e.byte) + ": " + e.what());
  }
  std::vector<CheckReport> out;
  for (const auto& r : j.at("reports")) {
    CheckReport c;
    c.name = r.at("name").get<std::string>();
    c.lhs = number_from_json(r.at("lhs"));
    c.rhs = number_from_json(r.at("rhs"));
    c.slack = number_from_json(r.at("slack"));
    c.pass = r.at("pass").get<bool>();
    c.applicable = r.value("applicable", true);
    c.resolution = number_from_json(r.at("resolution"));
    c.tolerance = number_from_json(r.at("tolerance"));
    c.notes = r.value("notes", "");
    for (const auto& [k, v] : r.at("extras").items()) c.extras.emplace_back(k, number_from_json(v));
    out.push_back(std::move(c));
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::IOError, "cannot open " + path + " for writing");
  os << text;
  if (!os) fail(ErrorKind::IOError, "write to " + path + " failed");
}

std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::IOError, "cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace dpt
