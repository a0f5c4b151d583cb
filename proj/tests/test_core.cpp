#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "wavegain/core/conv.hpp"
#include "wavegain/core/npy.hpp"
#include "wavegain/core/random.hpp"

using namespace wavegain;

namespace {

// Neumaier-compensated sum of products.
double kahan_dot(const Tensor<double>& a, const Tensor<double>& b) {
  double sum = 0.0, comp = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    const double v = a.data()[i] * b.data()[i];
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

Tensor<double> naive_correlate(const Tensor<double>& x, const Tensor<double>& w, Index pad) {
  const Index n = x.dim(0), c = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const Index f = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  const Index ho = h + 2 * pad - kh + 1, wo = wd + 2 * pad - kw + 1;
  Tensor<double> y({n, f, ho, wo});
  for (Index s = 0; s < n; ++s)
    for (Index o = 0; o < f; ++o)
      for (Index i = 0; i < ho; ++i)
        for (Index j = 0; j < wo; ++j) {
          double acc = 0.0;
          for (Index ch = 0; ch < c; ++ch)
            for (Index u = 0; u < kh; ++u)
              for (Index v = 0; v < kw; ++v) {
                const Index si = i + u - pad, sj = j + v - pad;
                if (si >= 0 && si < h && sj >= 0 && sj < wd) acc += w(o, ch, u, v) * x(s, ch, si, sj);
              }
          y(s, o, i, j) = acc;
        }
  return y;
}

}  // namespace

TEST_CASE("tensor shape bookkeeping") {
  Tensor<double> t({2, 3, 4});
  CHECK(t.size() == 24);
  CHECK(t.rank() == 3);
  CHECK(t.dim(-1) == 4);
  CHECK(t.planes() == 2);
  t(1, 2, 3) = 5.0;
  CHECK(t.values()[23] == 5.0);
  CHECK(t.plane(1)(2, 3) == 5.0);
  CHECK_THROWS_AS(t.reshaped({5, 5}), DimensionError);
  CHECK_THROWS_AS(Tensor<double>({2, 2}, Tensor<double>::Array::Zero(3)), DimensionError);
  CHECK(t.reshaped({6, 4})(5, 3) == 5.0);
}

TEST_CASE("complex_mul") {
  SUBCASE("identity and j squared") {
    ComplexTensor<double> one({1}), j({1}), z({1});
    one.re.values()[0] = 1.0;
    j.im.values()[0] = 1.0;
    z.re.values()[0] = 3.0;
    z.im.values()[0] = -2.0;
    const auto a = complex_mul(one, z);
    CHECK(a.re.values()[0] == 3.0);
    CHECK(a.im.values()[0] == -2.0);
    const auto b = complex_mul(j, j);
    CHECK(b.re.values()[0] == -1.0);
    CHECK(b.im.values()[0] == 0.0);
  }
  SUBCASE("matches a scalar loop") {
    Rng rng(1);
    ComplexTensor<double> a(rng.normal_tensor<double>({6, 4, 4}), rng.normal_tensor<double>({6, 4, 4}));
    ComplexTensor<double> b(rng.normal_tensor<double>({6, 4, 4}), rng.normal_tensor<double>({6, 4, 4}));
    const auto c = complex_mul(a, b);
    double err = 0.0;
    for (Index i = 0; i < a.size(); ++i) {
      const std::complex<double> za(a.re.data()[i], a.im.data()[i]), zb(b.re.data()[i], b.im.data()[i]);
      const auto zc = za * zb;
      err = std::max({err, std::abs(zc.real() - c.re.data()[i]), std::abs(zc.imag() - c.im.data()[i])});
    }
    CHECK(err <= 1e-15);
  }
  SUBCASE("bilinear in real scalars") {
    Rng rng(2);
    ComplexTensor<double> a(rng.normal_tensor<double>({5, 3}), rng.normal_tensor<double>({5, 3}));
    ComplexTensor<double> b(rng.normal_tensor<double>({5, 3}), rng.normal_tensor<double>({5, 3}));
    const double alpha = 1.7;
    ComplexTensor<double> sa(a.re, a.im);
    sa.re.values() *= alpha;
    sa.im.values() *= alpha;
    const auto lhs = complex_mul(sa, b);
    auto rhs = complex_mul(a, b);
    rhs.re.values() *= alpha;
    rhs.im.values() *= alpha;
    CHECK(max_abs_diff(lhs.re, rhs.re) <= 1e-14 * max_abs(rhs.re));
    CHECK(max_abs_diff(lhs.im, rhs.im) <= 1e-14 * max_abs(rhs.im));
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(complex_mul(ComplexTensor<double>({2, 3}), ComplexTensor<double>({3, 2})), DimensionError);
    CHECK_THROWS_AS(ComplexTensor<double>(Tensor<double>({2}), Tensor<double>({3})), DimensionError);
  }
}

TEST_CASE("inner_product") {
  CHECK(inner_product(Tensor<double>::constant({4}, 1.0), Tensor<double>::constant({4}, 1.0)) == 4.0);
  Tensor<double> e0({2}), e1({2});
  e0(0) = 1.0;
  e1(1) = 1.0;
  CHECK(inner_product(e0, e1) == 0.0);
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = rng.normal_tensor<double>({1000});
    const auto b = rng.normal_tensor<double>({1000});
    const double bound = 1e-12 * std::sqrt(squared_norm(a) * squared_norm(b));
    CHECK(std::abs(inner_product(a, b) - kahan_dot(a, b)) < bound);
    CHECK(inner_product(a, b) == inner_product(b, a));
  }
  CHECK_THROWS_AS(inner_product(Tensor<double>({3}), Tensor<double>({4})), DimensionError);
}

TEST_CASE("require_finite flags NaN and Inf") {
  Tensor<double> t({3});
  CHECK_NOTHROW(require_finite(t, "t"));
  t(1) = std::nan("");
  CHECK_THROWS_AS(require_finite(t, "t"), NumericError);
  t(1) = INFINITY;
  CHECK_THROWS_AS(require_finite(t, "t"), NumericError);
}

TEST_CASE("npy round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "wavegain_test_npy";
  std::filesystem::create_directories(dir);
  Rng rng(4);
  SUBCASE("double") {
    const auto t = rng.normal_tensor<double>({2, 3, 5});
    npy::save(dir / "a.npy", t);
    const auto u = npy::load<double>(dir / "a.npy");
    CHECK(u.shape() == t.shape());
    CHECK(max_abs_diff(u, t) == 0.0);
  }
  SUBCASE("float") {
    const auto t = rng.normal_tensor<float>({7});
    npy::save(dir / "b.npy", t);
    CHECK(max_abs_diff(npy::load<float>(dir / "b.npy"), t) == 0.0);
    // Header must be 64-byte aligned per the v1.0 format.
    std::ifstream is(dir / "b.npy", std::ios::binary);
    char magic[10];
    is.read(magic, 10);
    const unsigned header_len = static_cast<unsigned char>(magic[8]) | (static_cast<unsigned char>(magic[9]) << 8);
    CHECK((10 + header_len) % 64 == 0);
  }
  SUBCASE("complex") {
    ComplexTensor<double> z(rng.normal_tensor<double>({3, 3}), rng.normal_tensor<double>({3, 3}));
    npy::save_complex(dir / "z", z);
    CHECK(std::filesystem::exists(dir / "z.re.npy"));
    CHECK(std::filesystem::exists(dir / "z.im.npy"));
    const auto w = npy::load_complex<double>(dir / "z");
    CHECK(max_abs_diff(w.im, z.im) == 0.0);
  }
  SUBCASE("bad files") {
    CHECK_THROWS_AS(npy::load<double>(dir / "missing.npy"), IoError);
    std::ofstream(dir / "junk.npy") << "not an npy file";
    CHECK_THROWS_AS(npy::load<double>(dir / "junk.npy"), IoError);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("correlate2d matches a direct loop and its adjoints are transposes") {
  Rng rng(5);
  const auto x = rng.normal_tensor<double>({2, 3, 7, 6});
  const auto w = rng.normal_tensor<double>({4, 3, 3, 5});
  for (Index pad : {0, 1, 2}) {
    const auto y = correlate2d(x, w, pad);
    CHECK(max_abs_diff(y, naive_correlate(x, w, pad)) < 1e-13);
    const auto dy = rng.normal_tensor<double>(y.shape());
    const double lhs = inner_product(y, dy);
    CHECK(lhs == doctest::Approx(inner_product(x, correlate2d_input_adjoint(dy, w, pad, x.shape()))).epsilon(1e-12));
    CHECK(lhs == doctest::Approx(inner_product(w, correlate2d_weight_adjoint(x, dy, pad, 3, 5))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(correlate2d(x, rng.normal_tensor<double>({4, 2, 3, 3}), 1), DimensionError);
}

TEST_CASE("rng streams are reproducible") {
  auto a = Rng::derived(42, 3), b = Rng::derived(42, 3), c = Rng::derived(42, 4);
  const double va = a.normal();
  CHECK(va == b.normal());
  CHECK(va != c.normal());
}
