#pragma once

#include <cstdint>
#include <random>

#include "wavegain/core/tensor.hpp"

namespace wavegain {

/// Seeded generator shared by initializers, shufflers and test fixtures.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Derives an independent stream, e.g. per (seed, epoch).
  static Rng derived(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(std::mt19937_64(seq));
  }

  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

  template <typename Scalar>
  void fill_normal(Tensor<Scalar>& t, double stddev = 1.0) {
    for (Index i = 0; i < t.size(); ++i) t.data()[i] = static_cast<Scalar>(normal(0.0, stddev));
  }
  template <typename Scalar>
  void fill_uniform(Tensor<Scalar>& t, double lo, double hi) {
    for (Index i = 0; i < t.size(); ++i) t.data()[i] = static_cast<Scalar>(uniform(lo, hi));
  }

  template <typename Scalar>
  Tensor<Scalar> normal_tensor(Shape shape, double stddev = 1.0) {
    Tensor<Scalar> t(std::move(shape));
    fill_normal(t, stddev);
    return t;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  explicit Rng(std::mt19937_64 engine) : engine_(engine) {}
  std::mt19937_64 engine_;
};

}  // namespace wavegain
