#pragma once

#include <filesystem>

#include "wavegain/core/tensor.hpp"

namespace wavegain::npy {

/// Writes a C-order NPY v1.0 file with dtype '<f8' (double) or '<f4' (float).
template <typename Scalar>
void save(const std::filesystem::path& path, const Tensor<Scalar>& t);

/// Reads NPY v1.0/v2.0, C order, little-endian float32/float64 or integer
/// payloads, converting to Scalar.
template <typename Scalar>
Tensor<Scalar> load(const std::filesystem::path& path);

/// `<stem>.re.npy` / `<stem>.im.npy`.
template <typename Scalar>
void save_complex(const std::filesystem::path& stem, const ComplexTensor<Scalar>& t);

template <typename Scalar>
ComplexTensor<Scalar> load_complex(const std::filesystem::path& stem);

}  // namespace wavegain::npy
