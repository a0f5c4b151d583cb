#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "wavegain/data/cifar.hpp"

using namespace wavegain;
using namespace wavegain::data;
namespace fs = std::filesystem;

namespace {

// Record i of a synthetic file: label i % classes, pixel k = (i * 7 + k) % 256.
void write_records(const fs::path& path, CifarVariant v, int n, int label_offset = 0) {
  std::ofstream os(path, std::ios::binary);
  const int classes = class_count(v);
  for (int i = 0; i < n; ++i) {
    const int label = (i + label_offset) % classes;
    if (v == CifarVariant::Cifar100) os.put(static_cast<char>(label / 5));  // coarse
    os.put(static_cast<char>(label));
    for (int k = 0; k < kCifarPixels; ++k) os.put(static_cast<char>((i * 7 + k) % 256));
  }
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_cifar10(const fs::path& dir, int per_file) {
  for (int b = 1; b <= 5; ++b)
    write_records(dir / ("data_batch_" + std::to_string(b) + ".bin"), CifarVariant::Cifar10, per_file, b);
  write_records(dir / "test_batch.bin", CifarVariant::Cifar10, per_file);
}

}  // namespace

TEST_CASE("cifar10 synthetic files") {
  TempDir tmp("wavegain_test_cifar10");
  write_cifar10(tmp.path, 20);
  const auto raw = load_cifar_raw(tmp.path, CifarVariant::Cifar10);
  CHECK(raw.train.size() == 100);
  CHECK(raw.test.size() == 20);
  CHECK(raw.train.classes == 10);
  CHECK(raw.train.split == "train");
  CHECK(raw.test.split == "test");
  // Second file, record 3: label (3 + 2) % 10, first pixel byte 21.
  CHECK(raw.train.labels[23] == 5);
  CHECK(raw.train.images(23, 0, 0, 0) == doctest::Approx(21.0 / 255.0));
  CHECK(raw.train.images(23, 2, 31, 31) == doctest::Approx(((23 - 20) * 7 + 3071) % 256 / 255.0));

  SUBCASE("standardization uses train statistics") {
    const auto s = load_cifar(tmp.path, CifarVariant::Cifar10);
    for (int c = 0; c < 3; ++c) {
      double sum = 0.0, sq = 0.0;
      const Index n = s.train.size() * 1024;
      for (Index i = 0; i < s.train.size(); ++i)
        for (Index p = 0; p < 1024; ++p) {
          const double v = s.train.images.data()[(i * 3 + c) * 1024 + p];
          sum += v;
          sq += v * v;
        }
      CHECK(std::abs(sum / n) <= 1e-6);
      CHECK(std::sqrt(sq / n - (sum / n) * (sum / n)) == doctest::Approx(1.0).epsilon(1e-5));
    }
    CHECK(s.test.normalization.mean == s.train.normalization.mean);
    CHECK(s.train.normalization.stddev[0] != 1.0);
  }
  SUBCASE("archive subdirectory is found") {
    TempDir nested("wavegain_test_cifar10_nested");
    fs::create_directories(nested.path / "cifar-10-batches-bin");
    write_cifar10(nested.path / "cifar-10-batches-bin", 10);
    CHECK(load_cifar_raw(nested.path, CifarVariant::Cifar10).train.size() == 50);
  }
  SUBCASE("truncated file is named in the error") {
    fs::resize_file(tmp.path / "data_batch_3.bin", 3073 * 5 + 100);
    try {
      load_cifar_raw(tmp.path, CifarVariant::Cifar10);
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("data_batch_3.bin") != std::string::npos);
    }
  }
  SUBCASE("missing file") {
    fs::remove(tmp.path / "test_batch.bin");
    CHECK_THROWS_AS(load_cifar_raw(tmp.path, CifarVariant::Cifar10), IoError);
  }
  SUBCASE("label out of range") {
    {
      std::fstream f(tmp.path / "data_batch_1.bin", std::ios::in | std::ios::out | std::ios::binary);
      f.seekp(3073 * 4);
      f.put(static_cast<char>(10));
    }
    try {
      load_cifar_raw(tmp.path, CifarVariant::Cifar10);
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("data_batch_1.bin") != std::string::npos);
    }
  }
  SUBCASE("size check reports mismatches without throwing") {
    const auto checks = verify_cifar_files(tmp.path, CifarVariant::Cifar10);
    REQUIRE(checks.size() == 6);
    for (const auto& c : checks) {
      CHECK(c.present);
      CHECK(c.expected == 30730000);
      CHECK(c.actual == 20 * 3073);
      CHECK_FALSE(c.ok());
    }
    fs::remove(tmp.path / "test_batch.bin");
    CHECK_FALSE(verify_cifar_files(tmp.path, CifarVariant::Cifar10).back().present);
  }
}

TEST_CASE("cifar100 uses fine labels") {
  TempDir tmp("wavegain_test_cifar100");
  write_records(tmp.path / "train.bin", CifarVariant::Cifar100, 300);
  write_records(tmp.path / "test.bin", CifarVariant::Cifar100, 50);
  const auto raw = load_cifar_raw(tmp.path, CifarVariant::Cifar100);
  CHECK(raw.train.size() == 300);
  CHECK(raw.train.classes == 100);
  CHECK(raw.train.labels[57] == 57);
  CHECK(raw.train.labels[157] == 57);
  CHECK(raw.train.images(1, 0, 0, 0) == doctest::Approx(7.0 / 255.0));

  const auto sub = subsample_per_class(raw.train, 200, 4);
  std::vector<int> count(100, 0);
  for (int l : sub.labels) ++count[l];
  for (int c : count) CHECK(c == 2);
  CHECK_THROWS_AS(subsample_per_class(raw.train, 400, 4), ConfigError);  // 3 per class available
}

TEST_CASE("subsample_per_class") {
  Dataset d;
  d.classes = 10;
  d.images = Tensor<float>({500, 3, 32, 32});
  for (Index i = 0; i < 500; ++i) {
    d.labels.push_back(static_cast<int>((i * 3) % 10));
    d.images.data()[i * kCifarPixels] = static_cast<float>(i);
  }
  SUBCASE("exactly balanced, reproducible, without replacement") {
    const auto a = subsample_per_class(d, 100, 7), b = subsample_per_class(d, 100, 7);
    const auto c = subsample_per_class(d, 100, 8);
    REQUIRE(a.size() == 100);
    std::vector<int> count(10, 0);
    std::set<float> ids;
    for (Index i = 0; i < a.size(); ++i) {
      ++count[a.labels[i]];
      const float id = a.images.data()[i * kCifarPixels];
      ids.insert(id);
      CHECK(d.labels[static_cast<std::size_t>(id)] == a.labels[i]);
    }
    for (int k : count) CHECK(k == 10);
    CHECK(ids.size() == 100);
    CHECK(a.labels == b.labels);
    CHECK(a.images.values().isApprox(b.images.values()));
    CHECK_FALSE(a.images.values().isApprox(c.images.values()));
  }
  SUBCASE("total = N is a permutation") {
    const auto a = subsample_per_class(d, 500, 1);
    std::set<float> ids;
    for (Index i = 0; i < a.size(); ++i) ids.insert(a.images.data()[i * kCifarPixels]);
    CHECK(ids.size() == 500);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(subsample_per_class(d, 105, 1), ConfigError);
    CHECK_THROWS_AS(subsample_per_class(d, 510, 1), ConfigError);
    CHECK_THROWS_AS(subsample_per_class(d, 0, 1), ConfigError);
  }
}

TEST_CASE("batches") {
  const auto b = batch_indices(10, 4, 3, 1);
  REQUIRE(b.size() == 3);
  CHECK(b[0].size() == 4);
  CHECK(b[1].size() == 4);
  CHECK(b[2].size() == 2);
  std::multiset<Index> seen;
  for (const auto& batch : b) seen.insert(batch.begin(), batch.end());
  CHECK(seen == std::multiset<Index>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(batch_indices(10, 4, 3, 1) == b);
  CHECK(batch_indices(1000, 128, 3, 2) != batch_indices(1000, 128, 3, 1));
  CHECK(batch_indices(1000, 128, 4, 1) != batch_indices(1000, 128, 3, 1));
  CHECK(batch_indices(0, 4, 0, 0).empty());
  CHECK_THROWS_AS(batch_indices(10, 0, 0, 0), ConfigError);

  Dataset d;
  d.classes = 2;
  d.images = Tensor<float>({3, 3, 32, 32});
  d.images.values().setLinSpaced(0.0f, 1.0f);
  d.labels = {0, 1, 0};
  const auto x = gather_images<double>(d, {2, 0});
  CHECK(x.shape() == Shape{2, 3, 32, 32});
  CHECK(x(0, 0, 0, 0) == static_cast<double>(d.images(2, 0, 0, 0)));
  CHECK(gather_labels(d, {2, 1}) == std::vector<int>{0, 1});
  CHECK_THROWS_AS(gather_images<double>(d, {3}), DimensionError);
}
