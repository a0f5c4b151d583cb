#pragma once

// CIFAR-10/100 binary-format loading, normalization and batching.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wavegain/core/tensor.hpp"

namespace wavegain::data {

enum class CifarVariant { Cifar10, Cifar100 };

CifarVariant parse_variant(const std::string& name);  // "cifar10" | "cifar100"
std::string to_string(CifarVariant v);
int class_count(CifarVariant v);

/// Per-channel mean and standard deviation.
struct Normalization {
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  std::array<double, 3> stddev{1.0, 1.0, 1.0};
};

struct Dataset {
  Tensor<float> images;  // [N x 3 x 32 x 32]
  std::vector<int> labels;
  int classes = 0;
  std::string split;
  Normalization normalization;  // identity until apply_normalization

  Index size() const { return static_cast<Index>(labels.size()); }
};

struct CifarSplits {
  Dataset train, test;
};

constexpr Index kCifarPixels = 3 * 32 * 32;

/// Expected file names and byte sizes, relative to the dataset root.
struct CifarFile {
  std::string name;
  std::uintmax_t bytes;
  bool train;
};
std::vector<CifarFile> cifar_files(CifarVariant v);

/// Directory holding the .bin files: `root` itself, or one of the
/// subdirectories the official archives unpack to.
std::filesystem::path resolve_cifar_dir(const std::filesystem::path& root, CifarVariant v);

/// Raw pixels scaled to [0, 1]. Missing, truncated or mislabelled files raise
/// IoError naming the file.
CifarSplits load_cifar_raw(const std::filesystem::path& root, CifarVariant v);

Normalization fit_normalization(const Dataset& d);
/// Standardizes d in place and records n in it.
void apply_normalization(Dataset& d, const Normalization& n);

/// load_cifar_raw, then standardization with statistics of the train split.
CifarSplits load_cifar(const std::filesystem::path& root, CifarVariant v);

/// total / classes examples of every class, drawn without replacement after a
/// seeded shuffle; the result is in shuffled order. ConfigError when total is
/// not divisible by the class count or some class is too small.
Dataset subsample_per_class(const Dataset& d, Index total, std::uint64_t seed);

/// A permutation of [0, n) split into batches of `batch` (the last may be
/// short), deterministic in (seed, epoch).
std::vector<std::vector<Index>> batch_indices(Index n, Index batch, std::uint64_t seed, std::uint64_t epoch);

/// Images and labels of the given rows, cast to Scalar.
template <typename Scalar>
Tensor<Scalar> gather_images(const Dataset& d, const std::vector<Index>& rows);
std::vector<int> gather_labels(const Dataset& d, const std::vector<Index>& rows);

struct FileCheck {
  std::string name;
  std::uintmax_t expected = 0, actual = 0;
  bool present = false;
  bool ok() const { return present && expected == actual; }
};

/// Presence and size of every expected file; never throws for missing files.
std::vector<FileCheck> verify_cifar_files(const std::filesystem::path& root, CifarVariant v);

}  // namespace wavegain::data
