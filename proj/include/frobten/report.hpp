#pragma once

#include <string>
#include <vector>

namespace frobten {

struct Violation {
  std::string location;
  std::string lhs;
  std::string rhs;
};

// Result of a formal check: empty violation list means every verifiable
// instance held; `unverifiable` records instances that the truncation order
// cannot reach (reported, never silently passed).
struct CheckReport {
  std::vector<Violation> violations;
  std::vector<std::string> unverifiable;

  bool pass() const { return violations.empty(); }
  bool complete() const { return unverifiable.empty(); }

  std::string status() const {
    if (!violations.empty()) return "fail";
    return unverifiable.empty() ? "pass" : "partial";
  }

  void merge(const CheckReport& o) {
    violations.insert(violations.end(), o.violations.begin(),
                      o.violations.end());
    unverifiable.insert(unverifiable.end(), o.unverifiable.begin(),
                        o.unverifiable.end());
  }
};

}  // namespace frobten
