#include "crflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "crflow/errors.hpp"
#include "crflow/field.hpp"
#include "crflow/parallel.hpp"

namespace crflow {

double Grid::min_spacing() const { return std::min({spacing(0), spacing(1), spacing(2)}); }

void Grid::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (n[a] < 8) throw ConfigError("grid resolution must be at least 8 on every axis", 0, "grid.n");
        if (!(period[a] > 0.0)) throw ConfigError("grid period must be positive", 0, "grid.period");
    }
    if (order != 2 && order != 4) throw ConfigError("stencil order must be 2 or 4", 0, "grid.order");
}

StencilCoeffs StencilCoeffs::of(const Grid& g) {
    StencilCoeffs s;
    if (g.order == 4) {
        s.c1 = 2.0 / 3.0;
        s.c2 = -1.0 / 12.0;
    }
    for (int a = 0; a < 3; ++a) s.inv_h[a] = 1.0 / g.spacing(a);
    return s;
}

double StencilCoeffs::symbol(double theta) const {
    return 2.0 * c1 * std::sin(theta) + 2.0 * c2 * std::sin(2.0 * theta);
}

void MetricField::validate() const {
    for (std::size_t i = 0; i < size(); ++i)
        if (!is_positive_definite(data[i])) throw NonPositiveDefinite(i);
}

void configure_threads_from_env() {
#ifdef _OPENMP
    if (const char* env = std::getenv("CRFLOW_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) omp_set_num_threads(t);
    }
#endif
}

int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace crflow
