#include "eigenweight/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace eigenweight {

double Weight::total_integral() const {
  double s = 0.0;
  for (double v : values) s += v;
  return element_measure * s;
}

double Weight::min_value() const {
  if (values.empty()) throw std::invalid_argument("empty weight");
  return *std::min_element(values.begin(), values.end());
}

double Weight::max_value() const {
  if (values.empty()) throw std::invalid_argument("empty weight");
  return *std::max_element(values.begin(), values.end());
}

double StepRearrangement::value_at(double s) const {
  for (std::size_t i = 0; i < breakpoints.size(); ++i)
    if (s < breakpoints[i]) return levels[i];
  return levels.empty() ? 0.0 : levels.back();
}

double StepRearrangement::partial_integral(double t) const {
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const double upper = std::min(t, breakpoints[i]);
    if (upper > prev) acc += levels[i] * (upper - prev);
    if (breakpoints[i] >= t) break;
    prev = breakpoints[i];
  }
  return acc;
}

namespace {

StepRearrangement make_step(const std::vector<double>& levels_descending, double piece_measure) {
  StepRearrangement r;
  for (std::size_t i = 0; i < levels_descending.size(); ++i) {
    const double b = piece_measure * static_cast<double>(i + 1);
    if (!r.levels.empty() && r.levels.back() == levels_descending[i])
      r.breakpoints.back() = b;  // merge equal adjacent levels
    else {
      r.levels.push_back(levels_descending[i]);
      r.breakpoints.push_back(b);
    }
  }
  return r;
}

std::vector<double> sorted_descending(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<double>());
  return v;
}

}  // namespace

RearrangementClass RearrangementClass::from_weight(const Weight& m0) {
  if (m0.values.empty()) throw std::invalid_argument("empty generator weight");
  RearrangementClass cls;
  cls.generator_values = sorted_descending(m0.values);
  cls.element_measure = m0.element_measure;
  return cls;
}

double RearrangementClass::total_integral() const {
  double s = 0.0;
  for (double v : generator_values) s += v;
  return element_measure * s;
}

bool RearrangementClass::has_positive_value() const {
  return !generator_values.empty() && generator_values.front() > 0.0;
}

Weight RearrangementClass::sorted_descending_weight() const {
  return Weight{generator_values, element_measure};
}

Weight RearrangementClass::sorted_ascending_weight() const {
  std::vector<double> v(generator_values.rbegin(), generator_values.rend());
  return Weight{std::move(v), element_measure};
}

Weight RearrangementClass::mean_constant_weight() const {
  const double c = total_integral() / domain_measure();
  return Weight{std::vector<double>(generator_values.size(), c), element_measure};
}

double distribution_function(const Weight& w, double t) {
  std::size_t count = 0;
  for (double v : w.values)
    if (v > t) ++count;
  return w.element_measure * static_cast<double>(count);
}

StepRearrangement decreasing_rearrangement(const Weight& w) {
  if (w.values.empty()) throw std::invalid_argument("empty weight");
  return make_step(sorted_descending(w.values), w.element_measure);
}

bool majorizes(const Weight& f, const Weight& g, double tol) {
  if (f.element_measure != g.element_measure)
    throw std::invalid_argument("majorization needs equal element measures");
  if (f.values.size() != g.values.size())
    throw std::invalid_argument("majorization needs equal domain measures");
  const auto fs = sorted_descending(f.values);
  const auto gs = sorted_descending(g.values);
  double pf = 0.0, pg = 0.0;
  for (std::size_t k = 0; k < fs.size(); ++k) {
    pf += fs[k];
    pg += gs[k];
    if (pg > pf + tol / f.element_measure) return false;
  }
  return std::abs(pg - pf) <= tol / f.element_measure + 1e-15 * std::max(1.0, std::abs(pf));
}

bool class_contains(const RearrangementClass& cls, const Weight& w, double value_tol) {
  if (w.values.size() != cls.generator_values.size()) return false;
  if (w.element_measure != cls.element_measure) return false;
  const auto ws = sorted_descending(w.values);
  for (std::size_t i = 0; i < ws.size(); ++i)
    if (std::abs(ws[i] - cls.generator_values[i]) > value_tol) return false;
  return true;
}

bool closure_contains(const RearrangementClass& cls, const Weight& w, double tol) {
  if (w.values.size() != cls.generator_values.size()) return false;
  if (w.element_measure != cls.element_measure) return false;
  return majorizes(cls.sorted_descending_weight(), w, tol);
}

namespace {

std::vector<std::size_t> order_by_q_descending(std::span<const double> q) {
  std::vector<std::size_t> idx(q.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return q[a] > q[b]; });
  return idx;
}

void check_pairing_input(const RearrangementClass& cls, std::span<const double> q) {
  if (q.size() != cls.generator_values.size())
    throw std::invalid_argument("pairing: q size does not match the class element count");
  for (double qe : q)
    if (!(qe >= 0.0))
      throw std::invalid_argument("pairing: q must be nonnegative (caller bug)");
}

}  // namespace

Weight hl_max_pairing(const RearrangementClass& cls, std::span<const double> q) {
  check_pairing_input(cls, q);
  const auto idx = order_by_q_descending(q);
  Weight w{std::vector<double>(q.size()), cls.element_measure};
  for (std::size_t r = 0; r < idx.size(); ++r)
    w.values[idx[r]] = cls.generator_values[r];
  return w;
}

Weight hl_min_pairing(const RearrangementClass& cls, std::span<const double> q) {
  check_pairing_input(cls, q);
  const auto idx = order_by_q_descending(q);
  Weight w{std::vector<double>(q.size()), cls.element_measure};
  const std::size_t n = idx.size();
  for (std::size_t r = 0; r < n; ++r)
    w.values[idx[r]] = cls.generator_values[n - 1 - r];
  return w;
}

Truncation truncation_rearrangement(const RearrangementClass& cls) {
  const auto& v = cls.generator_values;  // sorted descending
  const double measure = cls.element_measure;
  const double total = cls.total_integral();
  if (!(total > 0.0))
    throw std::domain_error(
        "truncation needs a positive total integral; with a nonpositive total the "
        "tail integral of the decreasing rearrangement never vanishes inside the domain");

  Truncation out;
  if (v.back() >= 0.0) {
    // nonnegative generator: nothing to cancel, the head is the positive part
    std::size_t positive = 0;
    while (positive < v.size() && v[positive] > 0.0) ++positive;
    out.gamma = measure * static_cast<double>(positive);
    out.rearrangement = make_step(v, measure);
    return out;
  }

  // first t with cumulative integral == total; the crossing step has a
  // strictly positive level, so the interpolation below is exact
  double cum = 0.0;
  std::size_t k = 0;
  for (; k < v.size(); ++k) {
    const double next = cum + measure * v[k];
    if (next >= total) break;
    cum = next;
  }
  out.gamma = measure * static_cast<double>(k) + (total - cum) / v[k];

  std::vector<double> head;
  for (std::size_t i = 0; i < k; ++i) head.push_back(v[i]);
  StepRearrangement r = make_step(head, measure);
  const double partial = measure * static_cast<double>(k);
  if (out.gamma > partial) {
    if (!r.levels.empty() && r.levels.back() == v[k])
      r.breakpoints.back() = out.gamma;
    else {
      r.levels.push_back(v[k]);
      r.breakpoints.push_back(out.gamma);
    }
  }
  if (out.gamma < cls.domain_measure()) {
    if (!r.levels.empty() && r.levels.back() == 0.0)
      r.breakpoints.back() = cls.domain_measure();
    else {
      r.levels.push_back(0.0);
      r.breakpoints.push_back(cls.domain_measure());
    }
  }
  out.rearrangement = std::move(r);
  return out;
}

Weight checkerboard_rearrangement(const RearrangementClass& cls, int stripes) {
  const std::size_t n = cls.element_count();
  if (stripes < 1 || static_cast<std::size_t>(2 * stripes) > n)
    throw std::invalid_argument("stripe count must satisfy 1 <= k <= n/2 for " +
                                std::to_string(n) + " elements");
  const auto& v = cls.generator_values;
  const std::size_t half = n / 2;
  const std::size_t k = static_cast<std::size_t>(stripes);

  Weight w{std::vector<double>(), cls.element_measure};
  w.values.reserve(n);
  std::size_t hi = 0, lo = half;
  for (std::size_t s = 0; s < k; ++s) {
    // near-equal blocks, larger blocks first when 2k does not divide n
    const std::size_t hi_end = half * (s + 1) / k;
    const std::size_t lo_end = half + (n - half) * (s + 1) / k;
    for (; hi < hi_end; ++hi) w.values.push_back(v[hi]);
    for (; lo < lo_end; ++lo) w.values.push_back(v[lo]);
  }
  return w;
}

}  // namespace eigenweight
