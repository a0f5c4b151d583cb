#pragma once

// Oracles and measurements built on the gain layer: the layer as a dense
// matrix, impulse responses, spectral energy splits and the shape-diversity
// (degrees of freedom) estimate.

#include <cstdint>
#include <vector>

#include "wavegain/gainlayer/gain.hpp"

namespace wavegain {

/// Largest H * W accepted by build_dense_operator.
inline constexpr Index kDenseOperatorMaxPixels = 256;

/// [(F*H*W) x (C*H*W)]; column k is gain_forward of the k-th basis image.
Matrix<double> build_dense_operator(const GainParams<double>& p, Index rows, Index cols, const FilterSet& fs);

/// [F x C x size x size]: the output for a unit impulse at the centre of
/// input channel c. `size` must be odd.
Tensor<double> impulse_response(const GainParams<double>& p, Index size, const FilterSet& fs);

/// Fraction of the energy of a square plane inside the centred box of side
/// `box` (odd).
double box_energy_fraction(const RowMatrix<double>& plane, Index box);

/// |DFT|^2 of a plane, unshifted (bin (0, 0) is DC).
RowMatrix<double> power_spectrum(const RowMatrix<double>& plane);

/// Frequency of DFT bin k of n, wrapped to (-pi, pi].
double bin_frequency(Index k, Index n);

/// Energy fraction with lo < max(|w_row|, |w_col|) < hi, on the DFT grid of
/// the plane.
double annulus_energy_fraction(const RowMatrix<double>& plane, double lo, double hi);

/// Frequency-plane cell of subband s at scale j (1-based), together with its
/// mirror through the origin. With u = w_col, v = -w_row, B = [pi/2^j,
/// pi/2^(j-1)] and L = [0, pi/2^j), the cells in the v > 0 half-plane are
///   s=3: (B, L)   s=4: (B, B)   s=5: (L, B)
///   s=0: (-L, B)  s=1: (-B, B)  s=2: (-B, L)
/// and together they tile the scale-j annulus.
bool in_subband_region(double w_row, double w_col, int scale, int subband);

/// Energy fraction of a plane inside in_subband_region.
double subband_region_energy_fraction(const RowMatrix<double>& plane, int scale, int subband);

/// Image of cos(w_row * r + w_col * c + phase) on an n x n grid.
RowMatrix<double> sinusoid(Index n, double w_row, double w_col, double phase);

/// Per-subband share of the total highpass energy of one image.
/// Returns [J][6].
std::vector<std::vector<double>> highpass_energy_split(const RowMatrix<double>& image, int levels,
                                                       const FilterSet& fs);

struct DofEstimate {
  double dof = 0.0;
  double mean = 0.0;      // of the pairwise normalised correlations
  double variance = 0.0;  // ditto; dof = 1 / variance
  std::vector<double> correlations;
};

/// Moment fit of the degrees of freedom of a set of vectors: the normalised
/// inner products of d-dimensional i.i.d. Gaussian vectors have mean 0 and
/// variance 1/d, so d = 1 / var over all pairs. Zero vectors and zero variance
/// (e.g. identical shapes) raise NumericError.
DofEstimate estimate_dof(const std::vector<Vector<double>>& shapes);

/// The impulse responses of `num_shapes` random scale-2 configurations
/// (scale2_demo_params with seeds derived from `seed`), size x size.
std::vector<RowMatrix<double>> random_scale2_shapes(int num_shapes, std::uint64_t seed, Index size,
                                                    const FilterSet& fs);

/// estimate_dof over random_scale2_shapes.
DofEstimate corr_dof(int num_shapes, std::uint64_t seed, const FilterSet& fs, Index size = 33);

/// Estimator self-test: `num_vectors` i.i.d. N(0, 1) vectors of dimension d.
DofEstimate white_noise_dof(int num_vectors, int d, std::uint64_t seed);

/// Percentile bootstrap over shapes: resample the n shapes with replacement,
/// keep the pairs of distinct originals, recompute 1 / variance. Returns the
/// (1 - level)/2 and (1 + level)/2 quantiles.
std::pair<double, double> dof_confidence_interval(const DofEstimate& est, Index num_shapes, int resamples,
                                                  std::uint64_t seed, double level = 0.95);

}  // namespace wavegain
