#include "wavegain/transform/filters.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "wavegain/core/errors.hpp"
#include "wavegain/core/random.hpp"
#include "wavegain/transform/stage.hpp"

namespace wavegain {
namespace {

// Kingsbury's published DTCWT tables (as distributed with the reference
// MATLAB/Python toolboxes). The 2/M normalisation is already folded in:
// analysis + synthesis reconstructs with unit gain.

BiorthogonalFilters near_sym_a() {
  return {"near_sym_a",
          {-0.05, 0.25, 0.6, 0.25, -0.05},
          {0.010714285714285713, -0.05357142857142857, -0.26071428571428573, 0.6071428571428571,
           -0.26071428571428573, -0.05357142857142857, 0.010714285714285713},
          {-0.010714285714285713, -0.05357142857142857, 0.26071428571428573, 0.6071428571428571,
           0.26071428571428573, -0.05357142857142857, -0.010714285714285713},
          {-0.05, -0.25, 0.6, -0.25, -0.05}};
}

BiorthogonalFilters near_sym_b() {
  return {"near_sym_b",
          {-0.0017578125, 0.0, 0.022265625, -0.046875, -0.0482421875, 0.296875, 0.55546875, 0.296875,
           -0.0482421875, -0.046875, 0.022265625, 0.0, -0.0017578125},
          {-7.062639508928571e-05, 0.0, 0.0013419015066964285, -0.0018833705357142855, -0.007156808035714285,
           0.023856026785714284, 0.05564313616071428, -0.05168805803571428, -0.29975760323660716,
           0.5594308035714286, -0.29975760323660716, -0.05168805803571428, 0.05564313616071428,
           0.023856026785714284, -0.007156808035714285, -0.0018833705357142855, 0.0013419015066964285, 0.0,
           -7.062639508928571e-05},
          {7.062639508928571e-05, 0.0, -0.0013419015066964285, -0.0018833705357142855, 0.007156808035714285,
           0.023856026785714284, -0.05564313616071428, -0.05168805803571428, 0.29975760323660716,
           0.5594308035714286, 0.29975760323660716, -0.05168805803571428, -0.05564313616071428,
           0.023856026785714284, 0.007156808035714285, -0.0018833705357142855, -0.0013419015066964285, 0.0,
           7.062639508928571e-05},
          {-0.0017578125, 0.0, 0.022265625, 0.046875, -0.0482421875, -0.296875, 0.55546875, -0.296875,
           -0.0482421875, 0.046875, 0.022265625, 0.0, -0.0017578125}};
}

Coefficients reversed(const Coefficients& c) { return {c.rbegin(), c.rend()}; }

// Tree a lowpass and highpass; the rest follows from time reversal
// (tree b analysis, and every synthesis filter).
QshiftFilters make_qshift(std::string name, Coefficients h0a, Coefficients h1a) {
  QshiftFilters q;
  q.name = std::move(name);
  q.h0a = std::move(h0a);
  q.h1a = std::move(h1a);
  q.h0b = reversed(q.h0a);
  q.h1b = reversed(q.h1a);
  q.g0a = reversed(q.h0a);
  q.g0b = reversed(q.h0b);
  q.g1a = reversed(q.h1a);
  q.g1b = reversed(q.h1b);
  return q;
}

QshiftFilters qshift_a() {
  return make_qshift("qshift_a",
                     {0.051130405283831656, -0.013975370246888838, -0.10983605166597087, 0.26383956105893763,
                      0.7666284677930372, 0.5636557101270515, 0.0008736226952170968, -0.1002312195074762,
                      -0.0016896812725281543, -0.006181881892116438},
                     {-0.006181881892116438, 0.0016896812725281543, -0.1002312195074762, -0.0008736226952170968,
                      0.5636557101270515, -0.7666284677930372, 0.26383956105893763, 0.10983605166597087,
                      -0.013975370246888838, -0.051130405283831656});
}

QshiftFilters qshift_b() {
  return make_qshift("qshift_b",
                     {0.003253142763653182, -0.00388321199915849, 0.03466034684485349, -0.03887280126882779,
                      -0.11720388769911527, 0.27529538466888204, 0.7561456438925225, 0.5688104207121227,
                      0.011866092033797, -0.1067118046866654, 0.023825384794920298, 0.01702522388155399,
                      -0.005439475937274115, -0.004556895628475491},
                     {-0.004556895628475491, 0.005439475937274115, 0.01702522388155399, -0.023825384794920298,
                      -0.1067118046866654, -0.011866092033797, 0.5688104207121227, -0.7561456438925225,
                      0.27529538466888204, 0.11720388769911527, -0.03887280126882779, -0.03466034684485349,
                      -0.00388321199915849, -0.003253142763653182});
}

const std::map<std::string, BiorthogonalFilters (*)()>& level1_tables() {
  static const std::map<std::string, BiorthogonalFilters (*)()> t{{"near_sym_a", near_sym_a},
                                                                  {"near_sym_b", near_sym_b}};
  return t;
}

const std::map<std::string, QshiftFilters (*)()>& qshift_tables() {
  static const std::map<std::string, QshiftFilters (*)()> t{{"qshift_a", qshift_a}, {"qshift_b", qshift_b}};
  return t;
}

double max_reverse_mismatch(const Coefficients& g, const Coefficients& h) {
  if (g.size() != h.size()) return INFINITY;
  double e = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) e = std::max(e, std::abs(g[k] - h[h.size() - 1 - k]));
  return e;
}

}  // namespace

std::vector<std::string> known_filter_tables() {
  std::vector<std::string> names;
  for (const auto& [k, v] : level1_tables()) names.push_back(k);
  for (const auto& [k, v] : qshift_tables()) names.push_back(k);
  return names;
}

FilterSetReport check_filter_set(const FilterSet& fs, unsigned seed) {
  constexpr Index n = 64;
  Rng rng(seed);
  const auto x = rng.normal_tensor<double>({n});
  FilterSetReport r;

  // Level 1: both trees (phases 0 and 1) of the two-band bank.
  const auto& b = fs.level1;
  Tensor<double> y1({n});
  for (Index phase = 0; phase < 2; ++phase) {
    y1.values() += upsample_filter(filter_decimate(x, b.h0, 0, phase), b.g0, 0, phase).values();
    y1.values() += upsample_filter(filter_decimate(x, b.h1, 0, phase), b.g1, 0, phase).values();
  }
  r.level1_pr_error = max_abs_diff(y1, x);

  const auto& q = fs.qshift;
  const auto lo = apply_along_axis(qshift_decimation_operator<double>(q.h0b, q.h0a, n), x, 0);
  const auto hi = apply_along_axis(qshift_decimation_operator<double>(q.h1b, q.h1a, n), x, 0);
  auto y2 = apply_along_axis(qshift_interpolation_operator<double>(q.g0b, q.g0a, n / 2), lo, 0);
  y2.values() += apply_along_axis(qshift_interpolation_operator<double>(q.g1b, q.g1a, n / 2), hi, 0).values();
  r.qshift_pr_error = max_abs_diff(y2, x);

  r.time_reverse_error = std::max({max_reverse_mismatch(q.g0a, q.h0a), max_reverse_mismatch(q.g0b, q.h0b),
                                   max_reverse_mismatch(q.g1a, q.h1a), max_reverse_mismatch(q.g1b, q.h1b)});
  return r;
}

FilterSet load_filter_set(std::string_view name) {
  std::string level1 = "near_sym_a", qshift = "qshift_a";
  const std::string s(name);
  if (const auto plus = s.find('+'); plus != std::string::npos) {
    level1 = s.substr(0, plus);
    qshift = s.substr(plus + 1);
  } else if (level1_tables().count(s)) {
    level1 = s;
  } else if (qshift_tables().count(s)) {
    qshift = s;
  } else {
    throw ConfigError("unknown filter set '" + s + "'");
  }
  const auto l1 = level1_tables().find(level1);
  const auto qs = qshift_tables().find(qshift);
  if (l1 == level1_tables().end()) throw ConfigError("unknown level-1 filters '" + level1 + "'");
  if (qs == qshift_tables().end()) throw ConfigError("unknown q-shift filters '" + qshift + "'");

  FilterSet fs{level1 + "+" + qshift, l1->second(), qs->second()};
  const auto report = check_filter_set(fs);
  if (!report.ok()) {
    throw ConfigError("filter set " + fs.name + " fails perfect reconstruction (level1 " +
                      std::to_string(report.level1_pr_error) + ", qshift " + std::to_string(report.qshift_pr_error) +
                      ")");
  }
  return fs;
}

}  // namespace wavegain
