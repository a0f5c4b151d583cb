#pragma once

// Wavelet gain layer: y = IDTCWT(G . DTCWT(x)), with complex gains per
// highpass subband and a real gain on the lowpass, mixing C input channels
// into F output channels.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wavegain/core/tensor.hpp"
#include "wavegain/transform/dtcwt.hpp"

namespace wavegain {

enum class InitScheme { UnitNormal, Glorot, Zeros };

InitScheme parse_init_scheme(const std::string& name);  // "unit-normal" | "glorot" | "zeros"
std::string to_string(InitScheme scheme);

template <typename Scalar>
struct GainParams {
  std::vector<ComplexTensor<Scalar>> g_hp;  // per scale: [F x C x 6 x kh x kw]
  Tensor<Scalar> g_lp;                      // [F x C x klp x klp], real
  int levels = 0;
  std::string filter_set = std::string(kDefaultFilterSet);
  InitScheme scheme = InitScheme::Zeros;
  std::uint64_t seed = 0;

  Index out_channels() const { return g_lp.dim(0); }
  Index in_channels() const { return g_lp.dim(1); }
  Index lowpass_size() const { return g_lp.dim(2); }

  /// Stored real scalars: 2 per complex gain tap plus the lowpass taps.
  Index parameter_count() const;

  /// Same shapes and metadata, every value zero (the shape of a gradient).
  GainParams zeros_like() const;

  template <typename Other>
  GainParams<Other> cast() const;
};

/// Draws every gain from the scheme's distribution; re and im independently.
///   unit-normal: N(0, 1)
///   glorot:      N(0, 2 / ((C + F) * 6 * kh * kw)) per real component
///   zeros:       all zero
/// `gain_size` is kh = kw of the highpass gains (odd).
template <typename Scalar>
GainParams<Scalar> gain_init(Index out_channels, Index in_channels, int levels, Index lowpass_size,
                             std::uint64_t seed, InitScheme scheme, Index gain_size = 1,
                             const std::string& filter_set = std::string(kDefaultFilterSet));

/// The impulse-demo configuration: F = C = 1, J = 2, scale-2 gains N(0, 1),
/// scale-1 and lowpass gains zero. Each shape has 12 random scalars.
template <typename Scalar>
GainParams<Scalar> scale2_demo_params(std::uint64_t seed);

/// Unit complex gain on the f == c diagonal at every subband and a centred
/// delta lowpass gain: the layer reduces to IDTCWT(DTCWT(x)) = x.
template <typename Scalar>
GainParams<Scalar> identity_params(Index channels, int levels, Index lowpass_size = 3);

template <typename Scalar>
struct GainLayerCache {
  Pyramid<Scalar> inputs;  // V: DTCWT of the padded input
  Shape input_shape;       // [N x C x H x W] before padding
};

/// Reusable transform plan for one padded image size.
template <typename Scalar>
class GainLayerPlan {
 public:
  GainLayerPlan(const FilterSet& fs, int levels, Index rows, Index cols);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index padded_rows() const { return transform_.rows(); }
  Index padded_cols() const { return transform_.cols(); }
  const Dtcwt<Scalar>& transform() const { return transform_; }

  /// Symmetric reflection of [.., H, W] up to the padded size, and its adjoint
  /// (fold-back accumulation).
  Tensor<Scalar> pad(const Tensor<Scalar>& x) const;
  Tensor<Scalar> pad_adjoint(const Tensor<Scalar>& xp) const;
  /// Central crop back to H x W, and its adjoint (zero embedding).
  Tensor<Scalar> crop(const Tensor<Scalar>& yp) const;
  Tensor<Scalar> crop_adjoint(const Tensor<Scalar>& y) const;

 private:
  Index rows_, cols_, top_, left_;
  Dtcwt<Scalar> transform_;
};

/// Smallest multiple of 2^levels that is >= n.
Index padded_extent(Index n, int levels);

template <typename Scalar>
struct GainBackward {
  Tensor<Scalar> dx;
  GainParams<Scalar> grads;
};

template <typename Scalar>
Tensor<Scalar> gain_forward(const Tensor<Scalar>& x, const GainParams<Scalar>& p, const GainLayerPlan<Scalar>& plan,
                            GainLayerCache<Scalar>* cache = nullptr);

/// dy: [N x F x H x W]. Gain gradients are summed over the batch.
template <typename Scalar>
GainBackward<Scalar> gain_backward(const Tensor<Scalar>& dy, const GainLayerCache<Scalar>& cache,
                                   const GainParams<Scalar>& p, const GainLayerPlan<Scalar>& plan);

// Plan-per-call forms.
template <typename Scalar>
Tensor<Scalar> gain_forward(const Tensor<Scalar>& x, const GainParams<Scalar>& p, const FilterSet& fs,
                            GainLayerCache<Scalar>* cache = nullptr);
template <typename Scalar>
GainBackward<Scalar> gain_backward(const Tensor<Scalar>& dy, const GainLayerCache<Scalar>& cache,
                                   const GainParams<Scalar>& p, const FilterSet& fs);

/// Writes g_lp.npy, g_hp{j}.re.npy / g_hp{j}.im.npy (j from 1) and
/// manifest.json (F, C, J, klp, filter set, init scheme, seed).
template <typename Scalar>
void save_gain_params(const std::filesystem::path& dir, const GainParams<Scalar>& p);
template <typename Scalar>
GainParams<Scalar> load_gain_params(const std::filesystem::path& dir);

}  // namespace wavegain
