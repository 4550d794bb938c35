#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ddro {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 0;
    bool quick = false;
    // Test hook: perturbs one analytic gradient so the gradient check must
    // fail; used to prove the harness actually detects regressions.
    bool corrupt_gradient = false;
};

// Seeded property suites over random instances: ball inclusions, risk
// sandwich, worst-C equivalence, duality agreement, closed forms, gradients,
// toy solver cross-checks, patrol sanity and determinism.
std::vector<CheckResult> run_verification(const VerifyOptions& options);

}  // namespace ddro
