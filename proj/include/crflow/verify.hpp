// Identity suite on seeded random smooth metrics at two resolutions.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crflow/grid.hpp"

namespace crflow {

enum class IdentityKind {
    algebraic,     // pointwise algebra, relative tolerance
    exact,         // holds exactly for the discrete operators, relative tolerance
    differential,  // residual shrinks at the stencil order
};

struct IdentityResult {
    std::string name;
    IdentityKind kind = IdentityKind::algebraic;
    double coarse = 0.0, fine = 0.0;  // residuals at the two resolutions
    double order = 0.0;               // log2(coarse / fine) scaled by the resolution ratio
    double nominal = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct VerifyOptions {
    std::vector<int> resolutions{16, 32};
    int order = 4;
    std::uint64_t seed = 12345;
    double algebraic_tolerance = 1e-12;
    double order_slack = 0.5;
    double convention_sign = 1.0;  // -1 only for the negative control
};

struct VerifyReport {
    std::vector<IdentityResult> identities;
    bool passed = true;
    /// Deterministic text table, one line per identity.
    std::string text() const;
    /// Names of failing identities, comma separated.
    std::string failures() const;
};

VerifyReport run_verify(const VerifyOptions& opt);

}  // namespace crflow
