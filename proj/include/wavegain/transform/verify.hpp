#pragma once

// Invariant suites for the transform, shared by the tests, the acceptance
// binary and `wavegain selftest`. All take the filter set by value so a
// deliberately corrupted table can be pushed through them.

#include <cstdint>

#include "wavegain/transform/dtcwt.hpp"

namespace wavegain {

/// max |S - I| for one 1-D stage, S = G_lo A_lo + G_hi A_hi on a length-n
/// signal: level 1 uses the biorthogonal pair, level >= 2 the q-shift pair.
double stage_reconstruction_error(const FilterSet& fs, int level, Index n);

/// max |inverse(forward(x)) - x| over `trials` random [channels x rows x cols]
/// inputs.
double perfect_reconstruction_error(const FilterSet& fs, int levels, Index channels, Index rows, Index cols,
                                    int trials, std::uint64_t seed);

/// Worst |<Ax, y> - <x, A^T y>| / max(|<Ax, y>|, |<x, A^T y>|) over random
/// pairs, for A = forward and A = inverse.
struct AdjointErrors {
  double forward = 0.0;
  double inverse = 0.0;
  double worst() const { return std::max(forward, inverse); }
};

/// Worst dot-test mismatch (as above) of every stage matrix of a `levels`
/// plan on rows x cols, applied along both axes against its transpose.
double stage_adjoint_error(const FilterSet& fs, int levels, Index rows, Index cols, int trials, std::uint64_t seed);

AdjointErrors transform_adjoint_errors(const FilterSet& fs, int levels, Index channels, Index rows, Index cols,
                                       int trials, std::uint64_t seed);

}  // namespace wavegain
