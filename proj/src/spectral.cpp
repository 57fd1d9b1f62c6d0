#include "crflow/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <vector>

namespace crflow {

struct FourierMultiplier::Impl {
    Grid grid;
    std::size_t nreal = 0;
    std::size_t ncomplex = 0;
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::vector<double> weight;  // multiplier / N, per complex coefficient
};

FourierMultiplier::FourierMultiplier(const Grid& grid, const Symbol& m) : impl_(std::make_unique<Impl>()) {
    Impl& s = *impl_;
    s.grid = grid;
    const int nx = grid.n[0], ny = grid.n[1], nz = grid.n[2];
    const int hx = nx / 2 + 1;
    s.nreal = grid.size();
    s.ncomplex = static_cast<std::size_t>(nz) * ny * hx;
    s.real = fftw_alloc_real(s.nreal);
    s.spec = fftw_alloc_complex(s.ncomplex);
    s.forward = fftw_plan_dft_r2c_3d(nz, ny, nx, s.real, s.spec, FFTW_ESTIMATE);
    s.backward = fftw_plan_dft_c2r_3d(nz, ny, nx, s.spec, s.real, FFTW_ESTIMATE);

    const StencilCoeffs st = StencilCoeffs::of(grid);
    auto sym = [&](int k, int axis) {
        const double theta = 2.0 * std::numbers::pi * k / grid.n[axis];
        return st.symbol(theta) * st.inv_h[axis];
    };
    s.weight.resize(s.ncomplex);
    const double scale = 1.0 / static_cast<double>(s.nreal);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < hx; ++i)
                s.weight[(static_cast<std::size_t>(k) * ny + j) * hx + i] = m(sym(i, 0), sym(j, 1), sym(k, 2)) * scale;
}

FourierMultiplier::~FourierMultiplier() {
    Impl& s = *impl_;
    fftw_destroy_plan(s.forward);
    fftw_destroy_plan(s.backward);
    fftw_free(s.real);
    fftw_free(s.spec);
}

void FourierMultiplier::apply(const Vector& in, Vector& out) const {
    Impl& s = *impl_;
    std::copy(in.begin(), in.end(), s.real);
    fftw_execute(s.forward);
    for (std::size_t q = 0; q < s.ncomplex; ++q) {
        s.spec[q][0] *= s.weight[q];
        s.spec[q][1] *= s.weight[q];
    }
    fftw_execute(s.backward);
    out.assign(s.real, s.real + s.nreal);
}

}  // namespace crflow
