#pragma once

#include "martin/fields.hpp"
#include "martin/io.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace martin::cli {

/// Exit codes: 0 success, 1 check or solver failure, 2 invalid configuration or arguments.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Closed-form Martin function for a domain kind, if the registry has one.
fields::FieldPtr closed_form_for(geometry::DomainKind kind);

/// Default plotting window for a registry field.
geometry::WindowBox default_window(const std::string& field);

struct CheckResult {
  std::string name;
  bool passed = false;
  bool expected = true;
  io::json details;

  /// passed, FAILED, FAILED-as-expected or unexpectedly-passed.
  std::string outcome() const;
  bool ok() const { return passed == expected; }
};

/// Runs one named audit check against the configuration.
CheckResult run_check(const std::string& name, const io::ExperimentConfig& cfg, io::Rng& rng);

/// Fitted order of max_p |Δ_h u(p)| over the given steps (log-log least squares).
/// Returns +inf when every residual is below 1e-10 (exactly discrete-harmonic fields).
double harmonicity_order(const fields::ScalarField& field, const std::vector<Point>& points,
                         const std::vector<double>& steps);

}  // namespace martin::cli
