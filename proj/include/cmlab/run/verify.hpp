#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace cmlab {

struct CheckResult {
  std::string name;
  bool passed = false;
  double runtime_ms = 0.0;
  nlohmann::ordered_json details;
};

struct VerifyReport {
  int format_version = 1;
  std::uint64_t seed = 0;
  bool all_passed = false;
  std::vector<CheckResult> checks;

  std::string to_json() const;
};

// Closed-form / analytic-oracle checks, self-contained (no checkpoints):
//   boundary           f(x, eps) = x exactly for random nets and inputs
//   solver_orders      Euler/Heun global-error slopes vs the Gaussian flow
//   lemma1             score-estimator error decays as 1/sqrt(M)
//   cd_fidelity        CD with the exact score approaches the true
//                      consistency function (slow: two full training runs)
//   theorem2           |L_CD - L_CT| shrinks under common random numbers
//   continuous_limits  (N-1)^p scaling limits and pseudo-objective gradients
std::vector<std::string> verify_check_names();

CheckResult run_verify_check(const std::string& name, std::uint64_t seed);

// Runs the named checks (all when `only` is empty). Unknown names are an
// input error.
VerifyReport run_verify(const std::vector<std::string>& only, std::uint64_t seed);

}  // namespace cmlab
