#pragma once

#include <Eigen/Core>

#include <cmath>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wavegain/core/errors.hpp"

namespace wavegain {

using Index = Eigen::Index;
using Shape = std::vector<Index>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline Index shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<>());
}

inline std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

/// Dense row-major N-d array. The trailing two axes can be viewed as an Eigen
/// matrix ("plane"); every leading axis is flattened into a plane index.
template <typename Scalar>
class Tensor {
 public:
  using Scalar_ = Scalar;
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  using PlaneMap = Eigen::Map<RowMatrix<Scalar>>;
  using ConstPlaneMap = Eigen::Map<const RowMatrix<Scalar>>;

  Tensor() = default;

  explicit Tensor(Shape shape) : shape_(std::move(shape)), values_(Array::Zero(shape_size(shape_))) {}

  Tensor(Shape shape, Array values) : shape_(std::move(shape)), values_(std::move(values)) {
    if (values_.size() != shape_size(shape_)) {
      throw DimensionError("tensor: " + std::to_string(values_.size()) + " values for shape " +
                           to_string(shape_));
    }
  }

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }

  static Tensor constant(Shape shape, Scalar value) {
    Tensor t(std::move(shape));
    t.values_.setConstant(value);
    return t;
  }

  const Shape& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  Index dim(int axis) const { return shape_.at(axis < 0 ? shape_.size() + axis : axis); }
  Index size() const { return values_.size(); }
  bool empty() const { return values_.size() == 0; }

  Array& values() { return values_; }
  const Array& values() const { return values_; }
  Scalar* data() { return values_.data(); }
  const Scalar* data() const { return values_.data(); }

  template <typename... Ix>
  Scalar& operator()(Ix... ix) {
    return values_[offset({static_cast<Index>(ix)...})];
  }
  template <typename... Ix>
  const Scalar& operator()(Ix... ix) const {
    return values_[offset({static_cast<Index>(ix)...})];
  }

  Index rows() const { return rank() >= 2 ? dim(-2) : 1; }
  Index cols() const { return rank() >= 1 ? dim(-1) : 1; }
  Index planes() const { return rows() * cols() == 0 ? 0 : size() / (rows() * cols()); }

  PlaneMap plane(Index p) { return PlaneMap(data() + p * rows() * cols(), rows(), cols()); }
  ConstPlaneMap plane(Index p) const {
    return ConstPlaneMap(data() + p * rows() * cols(), rows(), cols());
  }

  Tensor reshaped(Shape shape) const {
    if (shape_size(shape) != size()) {
      throw DimensionError("reshape " + to_string(shape_) + " -> " + to_string(shape));
    }
    return Tensor(std::move(shape), values_);
  }

  template <typename Other>
  Tensor<Other> cast() const {
    return Tensor<Other>(shape_, values_.template cast<Other>());
  }

  bool all_finite() const { return values_.isFinite().all(); }

 private:
  Index offset(std::initializer_list<Index> ix) const {
    Index off = 0;
    std::size_t axis = 0;
    for (Index i : ix) off = off * shape_[axis++] + i;
    return off;
  }

  Shape shape_;
  Array values_;
};

/// Complex array held as separate real and imaginary planes of equal shape.
template <typename Scalar>
struct ComplexTensor {
  Tensor<Scalar> re;
  Tensor<Scalar> im;

  ComplexTensor() = default;
  explicit ComplexTensor(const Shape& shape) : re(shape), im(shape) {}
  ComplexTensor(Tensor<Scalar> real, Tensor<Scalar> imag) : re(std::move(real)), im(std::move(imag)) {
    if (re.shape() != im.shape()) {
      throw DimensionError("complex tensor: re " + to_string(re.shape()) + " vs im " +
                           to_string(im.shape()));
    }
  }

  const Shape& shape() const { return re.shape(); }
  Index size() const { return re.size(); }
};

template <typename Scalar>
void require_same_shape(const Tensor<Scalar>& a, const Tensor<Scalar>& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(what) + ": shape " + to_string(a.shape()) + " vs " +
                         to_string(b.shape()));
  }
}

/// Throws NumericError if any value is NaN or infinite.
template <typename Scalar>
const Tensor<Scalar>& require_finite(const Tensor<Scalar>& t, const char* where) {
  if (!t.all_finite()) throw NumericError(std::string(where) + ": non-finite value");
  return t;
}

/// Elementwise (a.re + j a.im)(b.re + j b.im). Shapes must match exactly, or
/// `b` may be a single element that is applied to every entry of `a`.
template <typename Scalar>
ComplexTensor<Scalar> complex_mul(const ComplexTensor<Scalar>& a, const ComplexTensor<Scalar>& b) {
  if (b.size() == 1 && a.size() != 1) {
    const Scalar br = b.re.values()[0], bi = b.im.values()[0];
    ComplexTensor<Scalar> out(a.shape());
    out.re.values() = a.re.values() * br - a.im.values() * bi;
    out.im.values() = a.re.values() * bi + a.im.values() * br;
    return out;
  }
  if (a.shape() != b.shape()) {
    throw DimensionError("complex_mul: shape " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  }
  ComplexTensor<Scalar> out(a.shape());
  out.re.values() = a.re.values() * b.re.values() - a.im.values() * b.im.values();
  out.im.values() = a.re.values() * b.im.values() + a.im.values() * b.re.values();
  return out;
}

/// Sum of a[i] * b[i], accumulated in double, strictly in storage order from
/// index 0 upward. The order is fixed so the result is reproducible and
/// symmetric in its arguments bit for bit.
template <typename Scalar>
double inner_product(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  require_same_shape(a, b, "inner_product");
  const Scalar* pa = a.data();
  const Scalar* pb = b.data();
  double acc = 0.0;
  for (Index i = 0; i < a.size(); ++i) acc += static_cast<double>(pa[i]) * static_cast<double>(pb[i]);
  return acc;
}

/// Real inner product of complex tensors viewed as pairs of real planes.
template <typename Scalar>
double inner_product(const ComplexTensor<Scalar>& a, const ComplexTensor<Scalar>& b) {
  return inner_product(a.re, b.re) + inner_product(a.im, b.im);
}

template <typename Scalar>
double max_abs_diff(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  require_same_shape(a, b, "max_abs_diff");
  if (a.size() == 0) return 0.0;
  return static_cast<double>((a.values() - b.values()).abs().maxCoeff());
}

template <typename Scalar>
double max_abs(const Tensor<Scalar>& a) {
  return a.size() == 0 ? 0.0 : static_cast<double>(a.values().abs().maxCoeff());
}

template <typename Scalar>
double squared_norm(const Tensor<Scalar>& a) {
  return inner_product(a, a);
}

}  // namespace wavegain
