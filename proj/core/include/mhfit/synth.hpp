#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mhfit/dataset.hpp"

namespace mhfit {

/// Isotropic Gaussian class clusters for desk-scale testing. Classes are
/// labeled 1..n_classes.
struct SyntheticSpec {
  std::size_t n_classes = 3;
  std::size_t n_features = 12;
  std::size_t samples_per_class = 100;
  double cluster_separation = 10.0;
  double noise_std = 1.0;
  std::uint64_t seed = 0;

  void validate() const;

  /// Center of class index c (0-based). With n_classes <= n_features the
  /// centers are separation/sqrt(2) along distinct axes (pairwise distance
  /// exactly `separation`); otherwise they are spaced `separation` apart on
  /// the first axis.
  std::vector<double> center(std::size_t c) const;
};

/// Class-major rows, all subject 1. Deterministic in the spec.
LabeledDataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace mhfit
