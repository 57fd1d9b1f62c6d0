// Constant-coefficient Fourier multipliers, used as preconditioners.
#pragma once

#include <functional>
#include <memory>

#include "crflow/grid.hpp"
#include "crflow/krylov.hpp"

namespace crflow {

/// out = F^{-1}[ m(s) F[in] ], where s_a = symbol(theta_a)/h_a is the symbol of
/// the discrete first derivative along axis a (D e^{ikx} = i s e^{ikx}).
class FourierMultiplier {
  public:
    using Symbol = std::function<double(double sx, double sy, double sz)>;

    FourierMultiplier(const Grid& grid, const Symbol& multiplier);
    ~FourierMultiplier();
    FourierMultiplier(const FourierMultiplier&) = delete;
    FourierMultiplier& operator=(const FourierMultiplier&) = delete;

    void apply(const Vector& in, Vector& out) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace crflow
