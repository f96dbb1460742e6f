#pragma once

#include <string>
#include <utility>
#include <vector>

namespace dpt {

struct CheckReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  double resolution = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool applicable = true;
  std::string notes;
  std::vector<std::pair<std::string, double>> extras;

  double extra(const std::string& key) const;
};

// pass iff lhs <= rhs + tolerance
CheckReport make_report(std::string name, double lhs, double rhs, double resolution, double tolerance,
                        std::string notes = {});

CheckReport not_applicable(std::string name, std::string reason);

}  // namespace dpt
