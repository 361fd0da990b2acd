#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace phia {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Eigen::Index;

enum class ErrorCode { parse, config, dimension, numeric, divergence };

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::parse: return "parse";
    case ErrorCode::config: return "config";
    case ErrorCode::dimension: return "dimension";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::divergence: return "divergence";
  }
  return "unknown";
}

/// Library error with a machine-readable category (mapped to CLI exit codes).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

/// State partition sizes: m actuated, s unactuated coordinates.
struct Dimensions {
  Index m = 0;
  Index s = 0;
  Index n() const noexcept { return m + s; }
  bool valid() const noexcept { return m >= 1 && s >= 0; }
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  const CheckResult& at(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return c;
    throw std::out_of_range("no check named '" + std::string(name) + "'");
  }
};

}  // namespace phia
