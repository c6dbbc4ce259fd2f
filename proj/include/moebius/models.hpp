#pragma once

// Closed-form spectra and eigenfunctions of the flat ("fake") strip and of
// the effective strip carrying the geometric potential -cos(s/R)/(8R^2).

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "moebius/basis.hpp"
#include "moebius/error.hpp"
#include "moebius/geometry.hpp"
#include "moebius/mathieu.hpp"

namespace moebius {

inline constexpr double kEffectiveMathieuQ = -0.25;
/// Eigenvalues closer than this (relative) form one spectrum entry.
inline constexpr double kMergeTolerance = 1e-9;

enum class ModeFamily { fake, eff_ce, eff_se };

/// Label of a closed-form eigenpair. Fake modes use m in Z: m >= 0 is the
/// cosine (or constant) longitudinal factor of harmonic |m|, m < 0 the sine.
/// Effective modes use m >= 0 for ce and m >= 1 for se.
struct ModeIndex {
  ModeFamily family = ModeFamily::fake;
  int m = 0;
  int n = 1;

  bool operator==(const ModeIndex&) const = default;

  int harmonic() const { return m < 0 ? -m : m; }

  /// Order inside a degenerate entry: family, |m|, cosine-type before sine-type, n.
  friend bool operator<(const ModeIndex& x, const ModeIndex& y) {
    auto key = [](const ModeIndex& v) {
      return std::tuple(static_cast<int>(v.family), v.harmonic(), v.m < 0 ? 1 : 0, v.n);
    };
    return key(x) < key(y);
  }
};

inline std::string to_string(const ModeIndex& mode) {
  const char* fam = mode.family == ModeFamily::fake ? "fake" : mode.family == ModeFamily::eff_ce ? "ce" : "se";
  return std::string(fam) + "(" + std::to_string(mode.m) + "," + std::to_string(mode.n) + ")";
}

inline void validate(const ModeIndex& mode) {
  if (mode.family == ModeFamily::eff_ce && mode.m < 0) throw input_error("ce mode requires m >= 0");
  if (mode.family == ModeFamily::eff_se && mode.m < 1) throw input_error("se mode requires m >= 1");
  require_seam_parity(mode.harmonic(), mode.n);
}

inline BasisFunction basis_function(const ModeIndex& mode) {
  if (mode.family != ModeFamily::fake) throw input_error("basis functions are labelled by fake modes");
  validate(mode);
  return {mode.harmonic(), mode.m < 0 ? Trig::sin : Trig::cos, mode.n};
}

inline ModeIndex fake_mode(const BasisFunction& b) {
  return {ModeFamily::fake, b.trig == Trig::sin ? -b.harmonic : b.harmonic, b.n};
}

struct SpectrumEntry {
  double value = 0.0;
  std::vector<ModeIndex> modes;
  std::vector<double> mode_values;  // exact value of each member before merging

  std::size_t multiplicity() const { return modes.size(); }
};

enum class Model { fake, effective };

struct Spectrum {
  StripParams params;
  Model model = Model::fake;
  std::vector<SpectrumEntry> entries;

  /// The first `count` eigenvalues repeated by multiplicity (each member keeps its own value).
  std::vector<double> values(std::size_t count) const {
    std::vector<double> out;
    for (const auto& e : entries)
      for (double v : e.mode_values) {
        if (out.size() == count) return out;
        out.push_back(v);
      }
    if (out.size() < count) throw input_error("spectrum holds fewer than " + std::to_string(count) + " values");
    return out;
  }

  std::vector<ModeIndex> modes(std::size_t count) const {
    std::vector<ModeIndex> out;
    for (const auto& e : entries)
      for (const auto& m : e.modes) {
        if (out.size() == count) return out;
        out.push_back(m);
      }
    if (out.size() < count) throw input_error("spectrum holds fewer than " + std::to_string(count) + " modes");
    return out;
  }

  std::size_t total_multiplicity() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.multiplicity();
    return n;
  }
};

namespace detail {

struct Candidate {
  double value;
  ModeIndex mode;
};

inline bool within_merge_tolerance(double lower, double upper) {
  return upper - lower <= kMergeTolerance * std::max(1.0, std::abs(upper));
}

// Sort ascending, merge chains of values within tolerance, order modes inside
// each entry, and keep entries until `count` values are covered.
inline std::vector<SpectrumEntry> merge_candidates(std::vector<Candidate> cands, std::size_t count) {
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    if (x.value != y.value) return x.value < y.value;
    return x.mode < y.mode;
  });
  std::vector<SpectrumEntry> entries;
  std::size_t covered = 0;
  std::size_t i = 0;
  while (i < cands.size() && covered < count) {
    std::size_t j = i + 1;
    while (j < cands.size() && within_merge_tolerance(cands[j - 1].value, cands[j].value)) ++j;
    std::vector<Candidate> group(cands.begin() + static_cast<std::ptrdiff_t>(i), cands.begin() + static_cast<std::ptrdiff_t>(j));
    std::stable_sort(group.begin(), group.end(), [](const Candidate& x, const Candidate& y) { return x.mode < y.mode; });
    SpectrumEntry e;
    e.value = cands[i].value;
    for (const auto& c : group) {
      e.modes.push_back(c.mode);
      e.mode_values.push_back(c.value);
    }
    covered += e.multiplicity();
    entries.push_back(std::move(e));
    i = j;
  }
  return entries;
}

inline double kth_smallest(std::vector<double> v, std::size_t count) {
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(count - 1), v.end());
  return v[count - 1];
}

// Slack above the count-th value so that a degenerate cluster straddling it is complete.
inline double with_slack(double lambda) { return lambda + 1e-6 * std::max(1.0, std::abs(lambda)); }

}  // namespace detail

/// The smallest eigenvalues of the flat strip, (m/2R)^2 + (n pi/2a)^2 with m + n odd.
/// The index box is enlarged until it provably contains every mode below the count-th value.
inline Spectrum fake_spectrum(const StripParams& p, std::size_t count) {
  if (count == 0) throw input_error("spectrum count must be at least 1");
  const double E1 = p.transverse_ground_energy();
  auto value = [&](int m, int n) {
    const double kl = m / (2.0 * p.R);
    return kl * kl + E1 * n * n;
  };

  int kmax = static_cast<int>(count) + 2;
  int nmax = 2;
  for (;;) {
    std::vector<double> vals;
    for (int n = 1; n <= nmax; ++n)
      for (int m = -kmax; m <= kmax; ++m)
        if ((m + n) % 2 != 0) vals.push_back(value(m, n));
    const double bound = detail::with_slack(detail::kth_smallest(vals, count));
    const int need_k = static_cast<int>(std::floor(2.0 * p.R * std::sqrt(bound)));
    const int need_n = static_cast<int>(std::floor(std::sqrt(bound / E1)));
    if (need_k <= kmax && need_n <= nmax) {
      std::vector<detail::Candidate> cands;
      for (int n = 1; n <= nmax; ++n)
        for (int m = -kmax; m <= kmax; ++m)
          if ((m + n) % 2 != 0 && value(m, n) <= bound) cands.push_back({value(m, n), {ModeFamily::fake, m, n}});
      return {p, Model::fake, detail::merge_candidates(std::move(cands), count)};
    }
    kmax = std::max(kmax, need_k);
    nmax = std::max(nmax, need_n);
  }
}

/// Basis functions of the `N` lowest flat modes, in spectrum order.
inline std::vector<BasisFunction> fake_basis(const StripParams& p, std::size_t N) {
  const Spectrum spec = fake_spectrum(p, N);
  std::vector<BasisFunction> out;
  for (const auto& mode : spec.modes(N)) out.push_back(basis_function(mode));
  return out;
}

/// The smallest eigenvalues of the effective strip:
/// a_m(q)/(4R^2) + (n pi/2a)^2 (ce family) and b_m(q)/(4R^2) + (n pi/2a)^2 (se family), m + n odd.
/// `q` defaults to -1/4; q = 0 collapses to the flat spectrum.
/// Exhaustiveness uses |a_m(q) - m^2|, |b_m(q) - m^2| <= 2|q|.
inline Spectrum effective_spectrum(const StripParams& p, std::size_t count, double q = kEffectiveMathieuQ) {
  if (count == 0) throw input_error("spectrum count must be at least 1");
  const double E1 = p.transverse_ground_energy();
  const double scale = 1.0 / (4.0 * p.R * p.R);
  const double spread = 2.0 * std::abs(q);

  int mmax = static_cast<int>(count) + 2;
  int nmax = 2;
  CharacteristicTable table = char_values(q, mmax);
  for (;;) {
    if (table.max_order() < mmax) table = char_values(q, mmax);
    std::vector<detail::Candidate> all;
    for (int n = 1; n <= nmax; ++n)
      for (int m = 0; m <= mmax; ++m) {
        if ((m + n) % 2 == 0) continue;
        all.push_back({scale * table.a[static_cast<std::size_t>(m)] + E1 * n * n, {ModeFamily::eff_ce, m, n}});
        if (m >= 1) all.push_back({scale * table.b[static_cast<std::size_t>(m)] + E1 * n * n, {ModeFamily::eff_se, m, n}});
      }
    std::vector<double> vals;
    for (const auto& c : all) vals.push_back(c.value);
    const double bound = detail::with_slack(detail::kth_smallest(vals, count));
    const int need_m = static_cast<int>(std::floor(std::sqrt(std::max(0.0, bound / scale + spread))));
    const int need_n = static_cast<int>(std::floor(std::sqrt(std::max(0.0, (bound + spread * scale) / E1))));
    if (need_m <= mmax && need_n <= nmax) {
      std::erase_if(all, [&](const detail::Candidate& c) { return c.value > bound; });
      return {p, Model::effective, detail::merge_candidates(std::move(all), count)};
    }
    mmax = std::max(mmax, need_m);
    nmax = std::max(nmax, need_n);
  }
}

/// Flat-strip eigenfunction on the rescaled rectangle, unit norm on (0, 2 pi R) x (-1, 1).
inline BasisFunction fake_eigenfunction(const ModeIndex& mode, const StripParams&) {
  if (mode.family != ModeFamily::fake) throw input_error("fake_eigenfunction needs a fake mode, got " + to_string(mode));
  return basis_function(mode);
}

/// Effective-strip eigenfunction (pi R)^(-1/2) ce_m(s/2R, q) chi_n(u) (or se_m),
/// unit norm on the rescaled rectangle.
class EffectiveEigenfunction {
 public:
  EffectiveEigenfunction(const ModeIndex& mode, const StripParams& p, double q = kEffectiveMathieuQ)
      : mode_(mode), R_(p.R),
        fn_(mathieu_function(mode.family == ModeFamily::eff_ce ? MathieuKind::ce : MathieuKind::se, mode.m, q)),
        transverse_{0, Trig::cos, mode.n} {
    if (mode.family == ModeFamily::fake) throw input_error("effective_eigenfunction needs a ce/se mode, got " + to_string(mode));
    validate(mode);
  }

  const ModeIndex& mode() const { return mode_; }
  const MathieuFunction& mathieu() const { return fn_; }

  /// Longitudinal eigenvalue nu = mu / (4 R^2) of -phi'' - cos(s/R)/(8R^2) phi = nu phi.
  double longitudinal_eigenvalue() const { return fn_.characteristic_value() / (4.0 * R_ * R_); }

  double longitudinal(double s) const { return norm() * fn_(s / (2.0 * R_)); }
  double longitudinal_d2(double s) const { return norm() * fn_.second_derivative(s / (2.0 * R_)) / (4.0 * R_ * R_); }
  double transverse(double u) const { return transverse_.transverse(u); }

  double operator()(double s, double u) const { return longitudinal(s) * transverse(u); }

 private:
  double norm() const { return 1.0 / std::sqrt(std::numbers::pi * R_); }

  ModeIndex mode_;
  double R_;
  MathieuFunction fn_;
  BasisFunction transverse_;
};

inline EffectiveEigenfunction effective_eigenfunction(const ModeIndex& mode, const StripParams& p) {
  return EffectiveEigenfunction(mode, p);
}

}  // namespace moebius
