#include "wavegain/data/cifar.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "wavegain/core/random.hpp"

namespace wavegain::data {

namespace fs = std::filesystem;

CifarVariant parse_variant(const std::string& name) {
  if (name == "cifar10") return CifarVariant::Cifar10;
  if (name == "cifar100") return CifarVariant::Cifar100;
  throw ConfigError("dataset must be cifar10 or cifar100, got '" + name + "'");
}

std::string to_string(CifarVariant v) { return v == CifarVariant::Cifar10 ? "cifar10" : "cifar100"; }

int class_count(CifarVariant v) { return v == CifarVariant::Cifar10 ? 10 : 100; }

namespace {

// Bytes per record: label byte(s) then 3072 pixel bytes.
Index record_bytes(CifarVariant v) { return v == CifarVariant::Cifar10 ? 3073 : 3074; }

}  // namespace

std::vector<CifarFile> cifar_files(CifarVariant v) {
  if (v == CifarVariant::Cifar10) {
    std::vector<CifarFile> out;
    for (int i = 1; i <= 5; ++i) out.push_back({"data_batch_" + std::to_string(i) + ".bin", 30730000, true});
    out.push_back({"test_batch.bin", 30730000, false});
    return out;
  }
  return {{"train.bin", 153700000, true}, {"test.bin", 30740000, false}};
}

fs::path resolve_cifar_dir(const fs::path& root, CifarVariant v) {
  const std::string probe = cifar_files(v).back().name;
  const fs::path candidates[] = {root, root / "cifar-10-batches-bin", root / "cifar-100-binary",
                                 root / "batches"};
  for (const auto& c : candidates)
    if (fs::exists(c / probe)) return c;
  return root;
}

namespace {

void read_file(const fs::path& path, CifarVariant v, std::uintmax_t expected_bytes, Dataset& out) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  const auto size = fs::file_size(path);
  const Index rec = record_bytes(v);
  if (size == 0 || size % static_cast<std::uintmax_t>(rec) != 0 || (expected_bytes && size != expected_bytes)) {
    throw IoError(path.string() + ": " + std::to_string(size) + " bytes, expected " +
                  (expected_bytes ? std::to_string(expected_bytes) : "a multiple of " + std::to_string(rec)));
  }
  const Index n = static_cast<Index>(size / static_cast<std::uintmax_t>(rec));
  std::vector<unsigned char> buf(static_cast<std::size_t>(size));
  if (!is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(size))) {
    throw IoError("short read on " + path.string());
  }
  const Index start = out.size();
  Tensor<float> grown({start + n, 3, 32, 32});
  grown.values().head(out.images.size()) = out.images.values();
  const int classes = class_count(v);
  for (Index i = 0; i < n; ++i) {
    const unsigned char* r = buf.data() + i * rec;
    const int label = v == CifarVariant::Cifar10 ? r[0] : r[1];  // cifar100: coarse, fine
    if (label >= classes) {
      throw IoError(path.string() + ": record " + std::to_string(i) + " has label " + std::to_string(label));
    }
    out.labels.push_back(label);
    const unsigned char* px = r + (rec - kCifarPixels);
    float* dst = grown.data() + (start + i) * kCifarPixels;
    for (Index k = 0; k < kCifarPixels; ++k) dst[k] = static_cast<float>(px[k]) / 255.0f;
  }
  out.images = std::move(grown);
}

}  // namespace

CifarSplits load_cifar_raw(const fs::path& root, CifarVariant v) {
  const fs::path dir = resolve_cifar_dir(root, v);
  CifarSplits s;
  s.train.classes = s.test.classes = class_count(v);
  s.train.split = "train";
  s.test.split = "test";
  s.train.images = Tensor<float>({0, 3, 32, 32});
  s.test.images = Tensor<float>({0, 3, 32, 32});
  for (const auto& f : cifar_files(v)) {
    const fs::path p = dir / f.name;
    if (!fs::exists(p)) throw IoError("missing dataset file " + p.string());
    read_file(p, v, 0, f.train ? s.train : s.test);
  }
  return s;
}

Normalization fit_normalization(const Dataset& d) {
  Normalization n;
  const Index count = d.size();
  if (count == 0) throw ConfigError("fit_normalization: empty dataset");
  const Index hw = 32 * 32;
  for (int c = 0; c < 3; ++c) {
    double sum = 0.0, sq = 0.0;
    for (Index i = 0; i < count; ++i) {
      const auto seg = d.images.values().segment((i * 3 + c) * hw, hw).template cast<double>();
      sum += seg.sum();
      sq += seg.square().sum();
    }
    const double m = sum / static_cast<double>(count * hw);
    n.mean[c] = m;
    n.stddev[c] = std::sqrt(std::max(sq / static_cast<double>(count * hw) - m * m, 1e-12));
  }
  return n;
}

void apply_normalization(Dataset& d, const Normalization& n) {
  const Index hw = 32 * 32;
  for (Index i = 0; i < d.size(); ++i)
    for (int c = 0; c < 3; ++c) {
      auto seg = d.images.values().segment((i * 3 + c) * hw, hw);
      seg = (seg - static_cast<float>(n.mean[c])) / static_cast<float>(n.stddev[c]);
    }
  d.normalization = n;
}

CifarSplits load_cifar(const fs::path& root, CifarVariant v) {
  auto s = load_cifar_raw(root, v);
  const auto n = fit_normalization(s.train);
  apply_normalization(s.train, n);
  apply_normalization(s.test, n);
  return s;
}

namespace {

std::vector<Index> shuffled_range(Index n, Rng& rng) {
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  // Fisher-Yates with our own draws so the order does not depend on the
  // standard library's shuffle implementation.
  for (Index i = n - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng.engine()() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

}  // namespace

Dataset subsample_per_class(const Dataset& d, Index total, std::uint64_t seed) {
  if (d.classes < 1 || total < 1 || total % d.classes != 0) {
    throw ConfigError("subsample_per_class: total " + std::to_string(total) + " is not a positive multiple of " +
                      std::to_string(d.classes) + " classes");
  }
  if (total > d.size()) throw ConfigError("subsample_per_class: total exceeds the dataset size");
  const Index per_class = total / d.classes;
  Rng rng(seed);
  std::vector<Index> taken(static_cast<std::size_t>(d.classes), 0), rows;
  for (Index i : shuffled_range(d.size(), rng)) {
    auto& t = taken[static_cast<std::size_t>(d.labels[static_cast<std::size_t>(i)])];
    if (t < per_class) {
      ++t;
      rows.push_back(i);
    }
  }
  for (int c = 0; c < d.classes; ++c) {
    if (taken[c] < per_class) {
      throw ConfigError("subsample_per_class: class " + std::to_string(c) + " has only " +
                        std::to_string(taken[c]) + " examples, " + std::to_string(per_class) + " requested");
    }
  }
  Dataset out;
  out.classes = d.classes;
  out.split = d.split;
  out.normalization = d.normalization;
  out.images = gather_images<float>(d, rows);
  out.labels = gather_labels(d, rows);
  return out;
}

std::vector<std::vector<Index>> batch_indices(Index n, Index batch, std::uint64_t seed, std::uint64_t epoch) {
  if (batch < 1) throw ConfigError("batch size must be >= 1");
  auto rng = Rng::derived(seed, epoch);
  const auto perm = shuffled_range(n, rng);
  std::vector<std::vector<Index>> out;
  for (Index s = 0; s < n; s += batch) out.emplace_back(perm.begin() + s, perm.begin() + std::min(n, s + batch));
  return out;
}

template <typename Scalar>
Tensor<Scalar> gather_images(const Dataset& d, const std::vector<Index>& rows) {
  const Shape& s = d.images.shape();
  const Index per = s[1] * s[2] * s[3];
  Tensor<Scalar> out({static_cast<Index>(rows.size()), s[1], s[2], s[3]});
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] < 0 || rows[k] >= d.size()) throw DimensionError("gather_images: row out of range");
    out.values().segment(static_cast<Index>(k) * per, per) =
        d.images.values().segment(rows[k] * per, per).template cast<Scalar>();
  }
  return out;
}

std::vector<int> gather_labels(const Dataset& d, const std::vector<Index>& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (Index r : rows) out.push_back(d.labels.at(static_cast<std::size_t>(r)));
  return out;
}

std::vector<FileCheck> verify_cifar_files(const fs::path& root, CifarVariant v) {
  const fs::path dir = resolve_cifar_dir(root, v);
  std::vector<FileCheck> out;
  for (const auto& f : cifar_files(v)) {
    FileCheck c;
    c.name = (dir / f.name).string();
    c.expected = f.bytes;
    std::error_code ec;
    c.present = fs::is_regular_file(dir / f.name, ec);
    if (c.present) c.actual = fs::file_size(dir / f.name, ec);
    out.push_back(c);
  }
  return out;
}

template Tensor<float> gather_images<float>(const Dataset&, const std::vector<Index>&);
template Tensor<double> gather_images<double>(const Dataset&, const std::vector<Index>&);

}  // namespace wavegain::data
