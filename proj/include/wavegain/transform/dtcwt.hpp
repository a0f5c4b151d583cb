#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "wavegain/core/tensor.hpp"
#include "wavegain/transform/filters.hpp"
#include "wavegain/transform/stage.hpp"

namespace wavegain {

/// Subband orientations in degrees; the subband axis of every highpass tensor
/// follows this order.
inline constexpr std::array<int, 6> kOrientations{15, 45, 75, 105, 135, 165};

/// DTCWT coefficients of a stack of images [..., H, W].
///
/// lowpass:     [..., H / 2^(J-1), W / 2^(J-1)], real. This is the composite
///              lowpass holding the four trees as 2x2 polyphase components,
///              so each tree is H / 2^J x W / 2^J.
/// highpass[j]: [..., 6, H / 2^(j+1), W / 2^(j+1)], complex, j = 0..J-1
///              (scale j+1).
template <typename Scalar>
struct Pyramid {
  Tensor<Scalar> lowpass;
  std::vector<ComplexTensor<Scalar>> highpass;
  Index source_rows = 0;
  Index source_cols = 0;

  int levels() const { return static_cast<int>(highpass.size()); }
};

/// Real inner product over every plane of two pyramids of equal shape.
template <typename Scalar>
double inner_product(const Pyramid<Scalar>& a, const Pyramid<Scalar>& b);

/// Precomputed 2-D DTCWT for a fixed image size, level count and filter set.
/// Works on any stack of images: all axes before the last two are batch axes.
///
/// All four maps are linear. forward_adjoint and inverse_adjoint are the exact
/// transposes of forward and inverse; they reuse the synthesis / analysis
/// recursions with transposed stage matrices.
template <typename Scalar>
class Dtcwt {
 public:
  Dtcwt(const FilterSet& filters, int levels, Index rows, Index cols);

  Pyramid<Scalar> forward(const Tensor<Scalar>& x) const;
  Tensor<Scalar> inverse(const Pyramid<Scalar>& p) const;
  Tensor<Scalar> forward_adjoint(const Pyramid<Scalar>& p) const;
  Pyramid<Scalar> inverse_adjoint(const Tensor<Scalar>& x) const;

  /// Zero pyramid matching forward() for images with the given batch axes.
  Pyramid<Scalar> zeros(const Shape& batch) const;

  int levels() const { return levels_; }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  const FilterSet& filters() const { return filters_; }

  /// Extent of the composite lowpass / scale-j highpass along the row axis.
  Index lowpass_rows() const;
  Index lowpass_cols() const;

  // One separable stage: row operators act on the left, column operators on
  // the right (as their transposes).
  struct StageOps {
    SparseOp<Scalar> row_lo, row_hi, col_lo, col_hi;
  };
  const StageOps& analysis(int level) const { return analysis_[level]; }
  const StageOps& synthesis(int level) const { return synthesis_[level]; }

 private:
  void check_image(const Tensor<Scalar>& x, const char* what) const;
  void check_pyramid(const Pyramid<Scalar>& p, const char* what) const;

  FilterSet filters_;
  int levels_;
  Index rows_, cols_;
  std::vector<StageOps> analysis_, synthesis_;
  std::vector<StageOps> analysis_t_, synthesis_t_;
};

// Convenience wrappers that build a plan per call.

template <typename Scalar>
Pyramid<Scalar> dtcwt_forward(const Tensor<Scalar>& x, int levels, const FilterSet& fs);
template <typename Scalar>
Tensor<Scalar> dtcwt_inverse(const Pyramid<Scalar>& p, const FilterSet& fs);
template <typename Scalar>
Tensor<Scalar> dtcwt_forward_adjoint(const Pyramid<Scalar>& p, const FilterSet& fs);
template <typename Scalar>
Pyramid<Scalar> dtcwt_inverse_adjoint(const Tensor<Scalar>& x, int levels, const FilterSet& fs);

/// Writes lowpass.npy, scale{j}.re.npy / scale{j}.im.npy (j from 1) and
/// manifest.json (levels, shapes, filter set) into `dir`.
template <typename Scalar>
void save_pyramid(const std::filesystem::path& dir, const Pyramid<Scalar>& p, const std::string& filter_set);

template <typename Scalar>
Pyramid<Scalar> load_pyramid(const std::filesystem::path& dir, std::string* filter_set = nullptr);

}  // namespace wavegain
