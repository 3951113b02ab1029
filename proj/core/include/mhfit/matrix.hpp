#pragma once

#include <cstddef>
#include <span>

#include "mhfit/dataset.hpp"

namespace mhfit {

/// Non-owning row-major view of a feature matrix.
struct MatrixView {
  std::span<const double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;

  MatrixView() = default;
  MatrixView(std::span<const double> v, std::size_t r, std::size_t c)
      : values(v), rows(r), cols(c) {}
  explicit MatrixView(const LabeledDataset& ds)
      : values(ds.values()), rows(ds.n_rows()), cols(ds.n_channels()) {}

  double at(std::size_t r, std::size_t c) const noexcept {
    return values[r * cols + c];
  }
  std::span<const double> row(std::size_t r) const noexcept {
    return values.subspan(r * cols, cols);
  }
};

}  // namespace mhfit
