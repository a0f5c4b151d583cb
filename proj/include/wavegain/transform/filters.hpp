#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wavegain {

using Coefficients = std::vector<double>;

/// Odd-length biorthogonal pair used at level 1 (applied without decimation;
/// the four trees are the 2x2 polyphase components of the output).
struct BiorthogonalFilters {
  std::string name;
  Coefficients h0, h1;  // analysis lowpass / highpass
  Coefficients g0, g1;  // synthesis lowpass / highpass
};

/// Even-length quarter-shift filters used at levels >= 2, one set per tree.
struct QshiftFilters {
  std::string name;
  Coefficients h0a, h0b, h1a, h1b;  // analysis
  Coefficients g0a, g0b, g1a, g1b;  // synthesis
};

struct FilterSet {
  std::string name;  // "<level1>+<qshift>", e.g. "near_sym_a+qshift_a"
  BiorthogonalFilters level1;
  QshiftFilters qshift;
};

inline constexpr std::string_view kDefaultFilterSet = "near_sym_a+qshift_a";

/// Known level-1 tables: near_sym_a (5,7 taps), near_sym_b (13,19 taps).
/// Known q-shift tables: qshift_a (10 taps), qshift_b (14 taps).
///
/// `name` is either "<level1>+<qshift>" or a single table name, in which case
/// the other half defaults to near_sym_a / qshift_a. The loaded set is
/// validated (see check_filter_set); unknown names raise ConfigError.
FilterSet load_filter_set(std::string_view name);

std::vector<std::string> known_filter_tables();

struct FilterSetReport {
  double level1_pr_error = 0.0;   // max-abs error, one level-1 analysis+synthesis stage
  double qshift_pr_error = 0.0;   // max-abs error, one q-shift analysis+synthesis stage
  double time_reverse_error = 0.0;  // max |g - reverse(h)| over the q-shift pairs
  bool ok(double pr_tol = 1e-10, double rev_tol = 1e-15) const {
    return level1_pr_error <= pr_tol && qshift_pr_error <= pr_tol && time_reverse_error <= rev_tol;
  }
};

/// Two-band perfect reconstruction of a seeded length-64 random signal through
/// one stage of each kind, plus the q-shift time-reversal property.
FilterSetReport check_filter_set(const FilterSet& fs, unsigned seed = 0);

}  // namespace wavegain
