// Grid fields: scalars, covectors, symmetric tensors and the metric.
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "crflow/grid.hpp"
#include "crflow/tensor.hpp"

namespace crflow {

template <class T>
struct Field {
    Grid grid;
    std::vector<T> data;

    Field() = default;
    explicit Field(const Grid& g, const T& value = T{}) : grid(g), data(g.size(), value) {}

    std::size_t size() const { return data.size(); }
    T& operator[](std::size_t i) { return data[i]; }
    const T& operator[](std::size_t i) const { return data[i]; }
};

using ScalarField = Field<double>;
using CovectorField = Field<Vec3>;
using SymTensorField = Field<Sym3>;

/// A symmetric tensor field that is positive definite at every point.
class MetricField : public SymTensorField {
  public:
    MetricField() = default;
    explicit MetricField(const Grid& g, const Sym3& value = Sym3::identity()) : SymTensorField(g, value) {}
    explicit MetricField(SymTensorField t) : SymTensorField(std::move(t)) {}

    /// Throws NonPositiveDefinite at the first failing point.
    void validate() const;
};

}  // namespace crflow
