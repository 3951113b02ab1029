#include <string>

#include "binary_io.hpp"
#include "mhfit/error.hpp"
#include "mhfit/learners.hpp"

// Model file layout (little-endian), version 1:
//   "MHFITMD\0" | u32 version | u8 kind | u64 seed | u8 standardize
//   | hyperparameters (kind-specific, see write_params)
//   | u32 n_features | u32 K | K x u8 class codes
//   | u32 m | m f64 means | m f64 scales          (m = 0 when unstandardized)
//   | state (kind-specific, see write_state)
//   | u64 FNV-1a of all preceding bytes
// Tree: u32 value_size | u32 n_nodes, then per node i32 feature
//   | f64 threshold | i32 left | i32 right | f64 gain | u32 value_offset
//   | u32 n_values | n_values f64 (the leaf value pool).

namespace mhfit {

namespace {

constexpr std::string_view kModelMagic{"MHFITMD\0", 8};

void write_params(io::ByteWriter& w, const Hyperparameters& params) {
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, DecisionTreeParams>) {
          w.put_u64(p.max_depth);
          w.put_u64(p.min_samples_leaf);
        } else if constexpr (std::is_same_v<P, RandomForestParams>) {
          w.put_u64(p.n_trees);
          w.put_u64(p.max_depth);
          w.put_u64(p.min_samples_leaf);
          w.put_u8(p.bootstrap);
          w.put_u8(p.feature_subsampling);
        } else if constexpr (std::is_same_v<P, NaiveBayesParams>) {
          w.put_f64(p.var_smoothing);
        } else if constexpr (std::is_same_v<P, LogisticParams>) {
          w.put_f64(p.learning_rate);
          w.put_u64(p.epochs);
          w.put_f64(p.l2);
          w.put_f64(p.grad_tolerance);
        } else {
          w.put_u64(p.n_rounds);
          w.put_u64(p.max_depth);
          w.put_f64(p.learning_rate);
          w.put_f64(p.lambda);
          w.put_f64(p.gamma);
          w.put_f64(p.min_child_hessian);
        }
      },
      params);
}

Hyperparameters read_params(io::ByteReader& r, ModelKind kind) {
  switch (kind) {
    case ModelKind::DecisionTree: {
      DecisionTreeParams p;
      p.max_depth = r.get_u64();
      p.min_samples_leaf = r.get_u64();
      return p;
    }
    case ModelKind::RandomForest: {
      RandomForestParams p;
      p.n_trees = r.get_u64();
      p.max_depth = r.get_u64();
      p.min_samples_leaf = r.get_u64();
      p.bootstrap = r.get_u8() != 0;
      p.feature_subsampling = r.get_u8() != 0;
      return p;
    }
    case ModelKind::NaiveBayes: {
      NaiveBayesParams p;
      p.var_smoothing = r.get_f64();
      return p;
    }
    case ModelKind::LogisticRegression: {
      LogisticParams p;
      p.learning_rate = r.get_f64();
      p.epochs = r.get_u64();
      p.l2 = r.get_f64();
      p.grad_tolerance = r.get_f64();
      return p;
    }
    case ModelKind::GradientBoost: {
      BoostParams p;
      p.n_rounds = r.get_u64();
      p.max_depth = r.get_u64();
      p.learning_rate = r.get_f64();
      p.lambda = r.get_f64();
      p.gamma = r.get_f64();
      p.min_child_hessian = r.get_f64();
      return p;
    }
  }
  throw Error(ErrorKind::Corrupt, "model file: unknown model kind");
}

void write_doubles(io::ByteWriter& w, const std::vector<double>& v) {
  w.put_u32(static_cast<std::uint32_t>(v.size()));
  for (double x : v) w.put_f64(x);
}

std::vector<double> read_doubles(io::ByteReader& r) {
  const std::uint32_t n = r.get_u32();
  r.require(std::size_t{n} * 8);
  std::vector<double> v(n);
  for (auto& x : v) x = r.get_f64();
  return v;
}

void write_tree(io::ByteWriter& w, const Tree& tree) {
  w.put_u32(tree.value_size);
  w.put_u32(static_cast<std::uint32_t>(tree.nodes.size()));
  for (const auto& n : tree.nodes) {
    w.put_i32(n.feature);
    w.put_f64(n.threshold);
    w.put_i32(n.left);
    w.put_i32(n.right);
    w.put_f64(n.gain);
    w.put_u32(n.value_offset);
  }
  write_doubles(w, tree.values);
}

Tree read_tree(io::ByteReader& r, std::size_t n_features, std::size_t leaf_size) {
  Tree tree;
  tree.value_size = r.get_u32();
  if (tree.value_size != leaf_size) {
    throw Error(ErrorKind::Corrupt, "model file: tree leaf width does not match model");
  }
  const std::uint32_t count = r.get_u32();
  if (count == 0) throw Error(ErrorKind::Corrupt, "model file: empty tree");
  r.require(std::size_t{count} * 32);
  tree.nodes.resize(count);
  for (auto& n : tree.nodes) {
    n.feature = r.get_i32();
    n.threshold = r.get_f64();
    n.left = r.get_i32();
    n.right = r.get_i32();
    n.gain = r.get_f64();
    n.value_offset = r.get_u32();
  }
  tree.values = read_doubles(r);
  const auto size = static_cast<std::int32_t>(count);
  for (std::int32_t i = 0; i < size; ++i) {
    const auto& n = tree.nodes[static_cast<std::size_t>(i)];
    const bool ok = n.is_leaf()
                        ? std::size_t{n.value_offset} + leaf_size <= tree.values.size()
                        : static_cast<std::size_t>(n.feature) < n_features && n.left > i &&
                              n.right > i && n.left < size && n.right < size;
    if (!ok) throw Error(ErrorKind::Corrupt, "model file: malformed tree node");
  }
  return tree;
}

void write_state(io::ByteWriter& w, const ModelState& state) {
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, SingleTreeState>) {
          write_tree(w, s.tree);
        } else if constexpr (std::is_same_v<S, ForestState>) {
          w.put_u32(static_cast<std::uint32_t>(s.trees.size()));
          for (std::size_t t = 0; t < s.trees.size(); ++t) {
            w.put_u64(s.tree_seeds[t]);
            write_tree(w, s.trees[t]);
          }
        } else if constexpr (std::is_same_v<S, GaussianState>) {
          write_doubles(w, s.log_prior);
          write_doubles(w, s.mean);
          write_doubles(w, s.variance);
        } else if constexpr (std::is_same_v<S, LinearState>) {
          write_doubles(w, s.weights);
        } else {
          write_doubles(w, s.base_logits);
          w.put_f64(s.learning_rate);
          w.put_u32(static_cast<std::uint32_t>(s.rounds.size()));
          for (const auto& round : s.rounds) {
            for (const auto& t : round) write_tree(w, t);
          }
          write_doubles(w, s.train_loss);
        }
      },
      state);
}

void expect_size(const std::vector<double>& v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw Error(ErrorKind::Corrupt, std::string("model file: bad ") + what + " size");
  }
}

ModelState read_state(io::ByteReader& r, ModelKind kind, std::size_t d, std::size_t k) {
  switch (kind) {
    case ModelKind::DecisionTree:
      return SingleTreeState{read_tree(r, d, k)};
    case ModelKind::RandomForest: {
      ForestState s;
      const std::uint32_t n = r.get_u32();
      for (std::uint32_t t = 0; t < n; ++t) {
        s.tree_seeds.push_back(r.get_u64());
        s.trees.push_back(read_tree(r, d, k));
      }
      if (n == 0) throw Error(ErrorKind::Corrupt, "model file: empty forest");
      return s;
    }
    case ModelKind::NaiveBayes: {
      GaussianState s;
      s.log_prior = read_doubles(r);
      s.mean = read_doubles(r);
      s.variance = read_doubles(r);
      expect_size(s.log_prior, k, "prior");
      expect_size(s.mean, k * d, "mean");
      expect_size(s.variance, k * d, "variance");
      return s;
    }
    case ModelKind::LogisticRegression: {
      LinearState s{read_doubles(r)};
      expect_size(s.weights, k * (d + 1), "weight");
      return s;
    }
    case ModelKind::GradientBoost: {
      BoostState s;
      s.base_logits = read_doubles(r);
      const std::size_t n_out = k == 2 ? 1 : k;
      expect_size(s.base_logits, n_out, "base logit");
      s.learning_rate = r.get_f64();
      const std::uint32_t rounds = r.get_u32();
      for (std::uint32_t i = 0; i < rounds; ++i) {
        std::vector<Tree> round;
        for (std::size_t c = 0; c < n_out; ++c) round.push_back(read_tree(r, d, 1));
        s.rounds.push_back(std::move(round));
      }
      s.train_loss = read_doubles(r);
      return s;
    }
  }
  throw Error(ErrorKind::Corrupt, "model file: unknown model kind");
}

}  // namespace

std::vector<std::uint8_t> encode_model(const TrainedModel& model) {
  io::ByteWriter w;
  w.put_bytes({reinterpret_cast<const std::uint8_t*>(kModelMagic.data()), kModelMagic.size()});
  w.put_u32(kModelFileVersion);
  w.put_u8(static_cast<std::uint8_t>(model.spec.kind()));
  w.put_u64(model.spec.seed);
  w.put_u8(model.spec.standardize);
  write_params(w, model.spec.params);
  w.put_u32(static_cast<std::uint32_t>(model.n_features));
  w.put_u32(static_cast<std::uint32_t>(model.class_codes.size()));
  for (auto c : model.class_codes) w.put_u8(c.code());
  write_doubles(w, model.standardization.mean);
  write_doubles(w, model.standardization.scale);
  write_state(w, model.state);
  w.seal();
  return w.bytes();
}

TrainedModel decode_model(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes);
  r.expect_magic(kModelMagic, "model file");
  const std::uint32_t version = r.get_u32();
  if (version != kModelFileVersion) {
    throw Error(ErrorKind::VersionMismatch,
                "model file version " + std::to_string(version) + ", expected " +
                    std::to_string(kModelFileVersion));
  }
  // Verify the checksum before interpreting the payload, so a flipped byte is
  // reported as corruption rather than as whatever structure it happens to break.
  if (bytes.size() < r.position() + 8) {
    throw Error(ErrorKind::Truncated, "model file: truncated");
  }
  const std::size_t body = bytes.size() - 8;
  io::ByteReader seal(bytes.subspan(body));
  if (seal.get_u64() != io::fnv1a64(bytes.first(body))) {
    throw Error(ErrorKind::Checksum, "model file: checksum mismatch (corrupt or truncated)");
  }

  const std::uint8_t kind_byte = r.get_u8();
  if (kind_byte > static_cast<std::uint8_t>(ModelKind::GradientBoost)) {
    throw Error(ErrorKind::Corrupt, "model file: unknown model kind");
  }
  const auto kind = static_cast<ModelKind>(kind_byte);
  TrainedModel m;
  m.spec.seed = r.get_u64();
  m.spec.standardize = r.get_u8() != 0;
  m.spec.params = read_params(r, kind);
  m.n_features = r.get_u32();
  const std::uint32_t k = r.get_u32();
  if (k == 0 || k > kActivityCodeCount) throw Error(ErrorKind::Corrupt, "model file: bad class count");
  for (std::uint32_t i = 0; i < k; ++i) {
    const std::uint8_t code = r.get_u8();
    if (code > kMaxActivityCode || (i > 0 && code <= m.class_codes.back().code())) {
      throw Error(ErrorKind::Corrupt, "model file: bad class code list");
    }
    m.class_codes.emplace_back(code);
  }
  m.standardization.mean = read_doubles(r);
  m.standardization.scale = read_doubles(r);
  if (!m.standardization.mean.empty()) {
    expect_size(m.standardization.mean, m.n_features, "standardization");
    expect_size(m.standardization.scale, m.n_features, "standardization");
  }
  m.state = read_state(r, kind, m.n_features, k);
  r.verify_seal("model file");
  return m;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  io::write_file(path, encode_model(model));
}

TrainedModel load_model(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  try {
    return decode_model(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace mhfit
