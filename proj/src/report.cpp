#include "dpt/report.hpp"

#include <cmath>
#include <limits>

namespace dpt {

double CheckReport::extra(const std::string& key) const {
  for (const auto& [k, v] : extras)
    if (k == key) return v;
  return std::numeric_limits<double>::quiet_NaN();
}

CheckReport make_report(std::string name, double lhs, double rhs, double resolution, double tolerance,
                        std::string notes) {
  CheckReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.resolution = resolution;
  r.tolerance = tolerance;
  r.pass = std::isfinite(lhs) && std::isfinite(rhs) && lhs <= rhs + tolerance;
  r.notes = std::move(notes);
  return r;
}

CheckReport not_applicable(std::string name, std::string reason) {
  CheckReport r;
  r.name = std::move(name);
  r.pass = true;
  r.applicable = false;
  r.notes = "NotApplicable: " + std::move(reason);
  return r;
}

}  // namespace dpt
