#include "mhfit/synth.hpp"

#include <cmath>
#include <string>

#include "mhfit/error.hpp"
#include "mhfit/rng.hpp"

namespace mhfit {

void SyntheticSpec::validate() const {
  if (n_classes < 1 || n_features < 1 || samples_per_class < 1) {
    throw Error(ErrorKind::InvalidSpec, "synthetic: counts must be >= 1");
  }
  if (n_classes > static_cast<std::size_t>(kMaxActivityCode)) {
    throw Error(ErrorKind::InvalidSpec, "synthetic: at most 12 classes (activity codes 1..12)");
  }
  if (!(cluster_separation > 0.0) || !(noise_std > 0.0) || !std::isfinite(cluster_separation) ||
      !std::isfinite(noise_std)) {
    throw Error(ErrorKind::InvalidSpec, "synthetic: separation and noise must be finite and > 0");
  }
}

std::vector<double> SyntheticSpec::center(std::size_t c) const {
  std::vector<double> mu(n_features, 0.0);
  if (n_classes <= n_features) {
    mu[c] = cluster_separation / std::sqrt(2.0);
  } else {
    mu[0] = cluster_separation * static_cast<double>(c);
  }
  return mu;
}

LabeledDataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t d = spec.n_features;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < d; ++j) names.push_back("x" + std::to_string(j));

  Rng rng(spec.seed);
  std::vector<double> values;
  values.reserve(spec.n_classes * spec.samples_per_class * d);
  std::vector<ActivityLabel> labels;
  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    const auto mu = spec.center(c);
    for (std::size_t i = 0; i < spec.samples_per_class; ++i) {
      for (std::size_t j = 0; j < d; ++j) values.push_back(mu[j] + spec.noise_std * rng.normal());
      labels.emplace_back(static_cast<int>(c + 1));
    }
  }
  std::vector<SubjectId> subjects(labels.size(), 1);
  return LabeledDataset(std::move(names), std::move(values), std::move(labels),
                        std::move(subjects));
}

}  // namespace mhfit
