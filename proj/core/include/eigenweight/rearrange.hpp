#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace eigenweight {

/// Piecewise-constant weight on a grid: one value per element, all
/// elements of equal measure.
struct Weight {
  std::vector<double> values;
  double element_measure = 1.0;

  std::size_t size() const { return values.size(); }
  double total_integral() const;
  double domain_measure() const { return element_measure * static_cast<double>(values.size()); }
  double min_value() const;
  double max_value() const;
};

/// A right-continuous decreasing step function on (0, |Omega|): piece i
/// takes value levels[i] on [breakpoints[i-1], breakpoints[i]) with
/// breakpoints[-1] = 0 and breakpoints.back() = |Omega|. Canonical form:
/// adjacent equal levels are merged, breakpoints strictly increasing.
struct StepRearrangement {
  std::vector<double> breakpoints;
  std::vector<double> levels;

  double total_measure() const { return breakpoints.empty() ? 0.0 : breakpoints.back(); }
  double value_at(double s) const;
  /// Integral over (0, t), exact for the piecewise-constant function.
  double partial_integral(double t) const;
  double total_integral() const { return partial_integral(total_measure()); }
};

/// The class of rearrangements G(m0) of a generator weight on
/// equal-measure cells: the multiset of its element values. Members are
/// exactly the permutations of generator_values across the elements.
struct RearrangementClass {
  std::vector<double> generator_values;  // sorted descending
  double element_measure = 1.0;

  static RearrangementClass from_weight(const Weight& m0);

  std::size_t element_count() const { return generator_values.size(); }
  double total_integral() const;
  double domain_measure() const { return element_measure * static_cast<double>(generator_values.size()); }
  bool has_positive_value() const;

  Weight sorted_descending_weight() const;  // values descending in element index
  Weight sorted_ascending_weight() const;
  Weight mean_constant_weight() const;      // (1/|Omega|) integral, on every cell
};

/// d_w(t) = |{ w > t }|, right-continuous and decreasing in t.
double distribution_function(const Weight& w, double t);

/// The decreasing rearrangement w* as a canonical step function.
StepRearrangement decreasing_rearrangement(const Weight& w);

/// Tests g "is majorized by" f: partial integrals of g* never exceed
/// those of f* and the totals agree. Requires equal domain measure and
/// equal element measures. tol is an absolute slack on the integral
/// comparisons (0 = exact), needed when g carries floating-point error
/// from convex combinations.
bool majorizes(const Weight& f, const Weight& g, double tol = 0.0);

/// Membership in G(m0): multiset equality of values (within value_tol).
bool class_contains(const RearrangementClass& cls, const Weight& w, double value_tol = 0.0);

/// Membership in the weak* closure of G(m0): majorization by the generator.
bool closure_contains(const RearrangementClass& cls, const Weight& w, double tol = 1e-12);

/// Hardy-Littlewood pairings: arrange the generator values so that
/// sum_e m_e q_e is maximal (largest values on the largest q_e) or
/// minimal (reversed). Ties in q are broken by ascending element index,
/// so both maps are deterministic. q must be nonnegative.
Weight hl_max_pairing(const RearrangementClass& cls, std::span<const double> q);
Weight hl_min_pairing(const RearrangementClass& cls, std::span<const double> q);

struct Truncation {
  double gamma = 0.0;           // measure of the surviving head
  StepRearrangement rearrangement;  // m0* on (0, gamma), 0 on [gamma, |Omega|)
};

/// The truncation of the decreasing rearrangement at the measure gamma
/// where the tail integral of m0* vanishes. Requires a positive total
/// integral; gamma is found exactly from the cumulative sums of the step
/// function (linear interpolation inside the crossing step). For a
/// nonnegative generator the rearrangement is m0* itself and
/// gamma = |{m0 > 0}|.
Truncation truncation_rearrangement(const RearrangementClass& cls);

/// A fragmentation generator: splits the sorted-descending values into a
/// high half and a low half and interleaves them in k stripes of
/// near-equal width (exact when 2k divides the element count). k = 1
/// returns the values sorted descending along the element index.
Weight checkerboard_rearrangement(const RearrangementClass& cls, int stripes);

}  // namespace eigenweight
