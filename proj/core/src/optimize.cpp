#include "eigenweight/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace eigenweight {

namespace {

constexpr double kInClassValueTol = 1e-9;

double linear_pairing_value(const Weight& m, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t e = 0; e < q.size(); ++e) s += m.values[e] * q[e];
  return s;
}

Weight blend(const Weight& a, const Weight& b, double t) {
  Weight out{std::vector<double>(a.values.size()), a.element_measure};
  for (std::size_t e = 0; e < a.values.size(); ++e)
    out.values[e] = (1.0 - t) * a.values[e] + t * b.values[e];
  return out;
}

Weight minimize_start(const RearrangementClass& cls) {
  if (cls.element_count() >= 4) return checkerboard_rearrangement(cls, 2);
  return cls.sorted_descending_weight();
}

void attach_dirichlet_target(const RearrangementClass& cls, const Grid& grid, OptResult& result) {
  if (grid.bc_kind != BcKind::Dirichlet) return;
  Truncation tr = truncation_rearrangement(cls);
  result.gamma = tr.gamma;
  result.analytic_rearrangement = std::move(tr.rearrangement);
}

/// The multiset of values the maximizer is known to carry: under
/// Dirichlet its decreasing rearrangement is the truncation of m0*
/// (cell-averaged here), under Robin with m0 >= 0 it is m0 itself. For
/// Robin with a sign-changing generator the structure is open and no
/// multiset is returned.
std::optional<std::vector<double>> maximizer_multiset(const RearrangementClass& cls,
                                                      const Grid& grid) {
  if (grid.bc_kind == BcKind::Dirichlet) {
    const Truncation tr = truncation_rearrangement(cls);
    const double measure = cls.element_measure;
    std::vector<double> multiset(cls.element_count());
    for (std::size_t c = 0; c < multiset.size(); ++c) {
      const double lo = measure * static_cast<double>(c);
      const double hi = measure * static_cast<double>(c + 1);
      multiset[c] =
          (tr.rearrangement.partial_integral(hi) - tr.rearrangement.partial_integral(lo)) / measure;
    }
    return multiset;
  }
  if (cls.generator_values.back() >= 0.0) return cls.generator_values;
  return std::nullopt;
}

/// Values (sorted descending) arranged as a decreasing function of q:
/// the largest values go to the smallest q_e, ties in q broken by
/// ascending element index.
Weight arrange_decreasing_against(const std::vector<double>& values_desc,
                                  const std::vector<double>& q, double measure) {
  std::vector<std::size_t> idx(q.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return q[a] < q[b]; });
  Weight w{std::vector<double>(q.size()), measure};
  for (std::size_t r = 0; r < idx.size(); ++r) w.values[idx[r]] = values_desc[r];
  return w;
}

struct RoundingOutcome {
  Weight weight;
  double mu1 = 0.0;
  double gap = 0.0;
  Eigen::VectorXd u;
};

/// Fixed-point rounding onto the characterized maximizer shape: arrange
/// the known value multiset decreasingly against the element square
/// integrals and iterate until the arrangement repeats. The result is
/// only accepted by the caller when its own duality gap certifies
/// optimality, so a failed certificate falls back to the raw iterate.
std::optional<RoundingOutcome> characterization_rounding(const RearrangementClass& cls,
                                                         const Grid& grid, const PencilCache& cache,
                                                         const std::vector<double>& multiset,
                                                         std::vector<double> q) {
  Weight current{std::vector<double>(), cls.element_measure};
  for (int round = 0; round < 50; ++round) {
    Weight candidate = arrange_decreasing_against(multiset, q, cls.element_measure);
    const bool fixed_point = candidate.values == current.values;
    current = std::move(candidate);
    const PrincipalResult pr = cache.solve(current);
    if (!has_eigenpair(pr)) return std::nullopt;
    const EigenPair& pair = eigenpair(pr);
    q = element_square_integrals(grid, pair.u);
    if (fixed_point) {
      const Weight vertex = hl_min_pairing(cls, q);
      RoundingOutcome out;
      out.weight = std::move(current);
      out.mu1 = pair.mu1;
      out.gap = linear_pairing_value(out.weight, q) - linear_pairing_value(vertex, q);
      out.u = pair.u;
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace

OptResult minimize_lambda1(const RearrangementClass& cls, const Grid& grid, const OptOptions& opts) {
  if (static_cast<int>(cls.element_count()) != grid.num_elements())
    throw std::invalid_argument("class and grid have different element counts");
  if (!cls.has_positive_value())
    throw std::domain_error(
        "no generator value is positive: the pencil has no positive principal eigenvalue "
        "anywhere on the class");

  PencilCache cache(grid, opts.solver);

  Weight m = opts.initial_weight ? *opts.initial_weight : minimize_start(cls);
  if (!class_contains(cls, m))
    throw std::invalid_argument("initial weight is not a member of the class");
  PrincipalResult pr = cache.solve(m);
  if (!has_eigenpair(pr)) {
    // a fragmented start can fall below the discrete positive branch on a
    // coarse mesh; the fully concentrated vertex is the safest retry
    m = cls.sorted_descending_weight();
    pr = cache.solve(m);
    if (!has_eigenpair(pr))
      throw std::runtime_error("no iterate with a positive eigenvalue: " +
                               std::get<NoPositiveEigenvalue>(pr).diagnostic);
  }

  OptResult result;
  result.status = OptStatus::IterLimit;
  int iter = 0;
  while (iter < opts.max_iter) {
    // monotone ascent: the pairing step cannot decrease mu1
    bool at_fixed_point = false;
    while (iter < opts.max_iter) {
      const EigenPair& pair = eigenpair(pr);
      const std::vector<double> q = element_square_integrals(grid, pair.u);
      const Weight next = hl_max_pairing(cls, q);
      const double gap = linear_pairing_value(next, q) - linear_pairing_value(m, q);

      result.trace.push_back({iter++, pair.mu1, gap});
      if (opts.on_iterate) opts.on_iterate(m);
      result.final_u = pair.u;
      result.final_mu1 = pair.mu1;
      result.final_lambda1 = pair.lambda1;

      if (next.values == m.values || gap < opts.tol) {
        at_fixed_point = true;
        break;
      }
      m = next;
      pr = cache.solve(m);
      if (!has_eigenpair(pr))
        throw std::runtime_error("monotone ascent lost the positive eigenvalue: " +
                                 std::get<NoPositiveEigenvalue>(pr).diagnostic);
    }
    if (!at_fixed_point) break;

    // pairwise-swap polish: pairing fixed points are only locally optimal
    // (several comonotone arrangements can coexist), so scan all value
    // swaps and resume the ascent from a strictly better one
    const double mu_now = result.final_mu1;
    double best_mu = mu_now + 1e-14 * (1.0 + std::abs(mu_now));
    std::pair<std::size_t, std::size_t> best_swap{0, 0};
    for (std::size_t i = 0; i + 1 < m.values.size(); ++i) {
      for (std::size_t j = i + 1; j < m.values.size(); ++j) {
        if (m.values[i] == m.values[j]) continue;
        Weight trial = m;
        std::swap(trial.values[i], trial.values[j]);
        const double mu = cache.mu_tilde_of(trial);
        if (mu > best_mu) {
          best_mu = mu;
          best_swap = {i, j};
        }
      }
    }
    if (best_swap.first == best_swap.second) {
      result.status = OptStatus::Converged;
      break;
    }
    std::swap(m.values[best_swap.first], m.values[best_swap.second]);
    pr = cache.solve(m);
  }

  result.iterations = static_cast<int>(result.trace.size());
  result.final_weight = std::move(m);
  result.in_class = class_contains(cls, result.final_weight, kInClassValueTol);
  return result;
}

namespace {

/// Golden-section minimization of the segment objective on [lo, hi],
/// followed by an endpoint snap: when the interior minimum is not better
/// than an endpoint, the endpoint is returned exactly. Exact endpoint
/// steps are what drop exhausted vertices from the active set.
std::pair<double, double> golden_min(const PencilCache::Segment& seg, double lo, double hi,
                                     double width_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = seg.mu_tilde_at(x1), f2 = seg.mu_tilde_at(x2);
  double best_t = x1, best_f = f1;
  if (f2 < best_f) { best_t = x2; best_f = f2; }
  while (b - a > width_tol) {
    if (f1 <= f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = seg.mu_tilde_at(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = seg.mu_tilde_at(x2);
    }
    if (f1 < best_f) { best_t = x1; best_f = f1; }
    if (f2 < best_f) { best_t = x2; best_f = f2; }
  }
  const double slack = 1e-14 * std::max(1.0, std::abs(best_f));
  const double f_hi = seg.mu_tilde_at(hi);
  if (f_hi <= best_f + slack) return {hi, f_hi};
  const double f_lo = seg.mu_tilde_at(lo);
  if (f_lo <= best_f + slack) return {lo, f_lo};
  return {best_t, best_f};
}

/// The iterate of the conditional-gradient maximizer as an explicit
/// convex combination of class vertices, so that away steps can reduce
/// the mass of a bad vertex and drop it exactly.
class ActiveSet {
 public:
  explicit ActiveSet(Weight start) { atoms_.push_back({std::move(start), 1.0}); }

  const Weight& atom(std::size_t i) const { return atoms_[i].first; }
  double coefficient(std::size_t i) const { return atoms_[i].second; }
  std::size_t size() const { return atoms_.size(); }

  Weight combination() const {
    Weight m{std::vector<double>(atoms_.front().first.values.size(), 0.0),
             atoms_.front().first.element_measure};
    for (const auto& [v, alpha] : atoms_)
      for (std::size_t e = 0; e < m.values.size(); ++e) m.values[e] += alpha * v.values[e];
    return m;
  }

  std::size_t argmax_pairing(const std::vector<double>& q) const {
    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      const double value = linear_pairing_value(atoms_[i].first, q);
      if (value > best_value) {
        best_value = value;
        best = i;
      }
    }
    return best;
  }

  void fw_step(const Weight& vertex, double t) {
    if (t >= 1.0) {
      atoms_.assign(1, {vertex, 1.0});
      return;
    }
    for (auto& [v, alpha] : atoms_) alpha *= 1.0 - t;
    for (auto& [v, alpha] : atoms_) {
      if (v.values == vertex.values) {
        alpha += t;
        normalize();
        return;
      }
    }
    atoms_.push_back({vertex, t});
    normalize();
  }

  void away_step(std::size_t away, double t) {
    for (auto& [v, alpha] : atoms_) alpha *= 1.0 + t;
    atoms_[away].second -= t;
    normalize();
  }

 private:
  void normalize() {
    double sum = 0.0;
    std::erase_if(atoms_, [](const auto& a) { return a.second <= 1e-16; });
    for (const auto& [v, alpha] : atoms_) sum += alpha;
    for (auto& [v, alpha] : atoms_) alpha /= sum;
  }

  std::vector<std::pair<Weight, double>> atoms_;
};

}  // namespace

OptResult maximize_lambda1(const RearrangementClass& cls, const Grid& grid, const OptOptions& opts) {
  if (static_cast<int>(cls.element_count()) != grid.num_elements())
    throw std::invalid_argument("class and grid have different element counts");

  OptResult result;
  if (!(cls.total_integral() > 0.0)) {
    // sup lambda1 over the class is infinite; the closure minimizer of
    // mu~1 is the (nonpositive) constant mean with mu~1 = 0
    result.status = OptStatus::NoMaximizerRegime;
    result.final_weight = cls.mean_constant_weight();
    result.final_mu1 = 0.0;
    result.final_lambda1 = std::numeric_limits<double>::infinity();
    result.in_class = class_contains(cls, result.final_weight, kInClassValueTol);
    return result;
  }

  PencilCache cache(grid, opts.solver);

  // Conditional gradient with away steps: the plain variant stalls with a
  // sublinear tail on this polytope because the minimizer sits on a face,
  // so the iterate is kept as an explicit vertex combination and mass can
  // be pulled off exhausted vertices. The linear oracle and the duality
  // gap certificate are unchanged.
  ActiveSet active(opts.initial_weight ? *opts.initial_weight : cls.sorted_ascending_weight());
  Weight m = active.combination();
  if (!closure_contains(cls, m))
    throw std::invalid_argument("initial weight is not in the class closure");

  const std::optional<std::vector<double>> multiset = maximizer_multiset(cls, grid);

  // Accepts a rounded candidate only when its own duality gap certifies
  // optimality at the requested tolerance and it does not increase the
  // objective; returns true when the run can stop.
  auto try_rounding = [&](const std::vector<double>& q, double mu_now) {
    if (!multiset) return false;
    const auto rounded = characterization_rounding(cls, grid, cache, *multiset, q);
    if (!rounded) return false;
    if (!(rounded->gap < opts.tol)) return false;
    if (!(rounded->mu1 <= mu_now + 1e-14 * (1.0 + std::abs(mu_now)))) return false;
    m = rounded->weight;
    result.trace.push_back({static_cast<int>(result.trace.size()), rounded->mu1, rounded->gap});
    result.final_u = rounded->u;
    result.final_mu1 = rounded->mu1;
    result.final_lambda1 = 1.0 / rounded->mu1;
    result.status = OptStatus::Converged;
    return true;
  };

  result.status = OptStatus::IterLimit;
  for (int k = 0; k < opts.max_iter; ++k) {
    const PrincipalResult pr = cache.solve(m);
    if (!has_eigenpair(pr))
      throw std::runtime_error(
          "closure iterate lost the positive eigenvalue (discretization too coarse?): " +
          std::get<NoPositiveEigenvalue>(pr).diagnostic);
    const EigenPair& pair = eigenpair(pr);
    const std::vector<double> q = element_square_integrals(grid, pair.u);
    const Weight vertex = hl_min_pairing(cls, q);
    const double pairing_m = linear_pairing_value(m, q);
    const double gap = pairing_m - linear_pairing_value(vertex, q);

    result.trace.push_back({k, pair.mu1, gap});
    if (opts.on_iterate) opts.on_iterate(m);
    result.final_u = pair.u;
    result.final_mu1 = pair.mu1;
    result.final_lambda1 = pair.lambda1;

    if (gap < opts.tol) {
      result.status = OptStatus::Converged;
      break;
    }
    if (k % 25 == 0 && try_rounding(q, pair.mu1)) break;

    const std::size_t away = active.argmax_pairing(q);
    const double away_gap = linear_pairing_value(active.atom(away), q) - pairing_m;
    const double away_alpha = active.coefficient(away);

    if (gap >= away_gap || active.size() == 1) {
      const PencilCache::Segment seg = cache.segment(m, vertex);
      const auto [t, f] = golden_min(seg, 0.0, 1.0, opts.line_search_tol);
      active.fw_step(vertex, t);
    } else {
      // m + t (m - a) traced as the segment toward a with negative t
      const double t_max = std::min(away_alpha / (1.0 - away_alpha), 1e3);
      const PencilCache::Segment seg = cache.segment(m, active.atom(away));
      const auto [t, f] = golden_min(seg, -t_max, 0.0, opts.line_search_tol);
      active.away_step(away, -t);
    }
    m = active.combination();
  }

  if (result.status == OptStatus::IterLimit) {
    const PrincipalResult pr = cache.solve(m);
    if (has_eigenpair(pr)) {
      const EigenPair& pair = eigenpair(pr);
      result.final_u = pair.u;
      result.final_mu1 = pair.mu1;
      result.final_lambda1 = pair.lambda1;
      try_rounding(element_square_integrals(grid, pair.u), pair.mu1);
    }
  }

  result.iterations = static_cast<int>(result.trace.size());
  result.final_weight = std::move(m);
  result.in_class = class_contains(cls, result.final_weight, kInClassValueTol);
  attach_dirichlet_target(cls, grid, result);
  return result;
}

SweepResult fragmentation_sweep(const RearrangementClass& cls, const std::vector<int>& stripe_counts,
                                const Grid& grid, const SolverOptions& solver) {
  if (static_cast<int>(cls.element_count()) != grid.num_elements())
    throw std::invalid_argument("class and grid have different element counts");
  if (cls.total_integral() > 0.0)
    throw std::invalid_argument(
        "fragmentation sweep needs a nonpositive total integral; with a positive total a "
        "maximizer exists (use maximize_lambda1)");
  if (!cls.has_positive_value())
    throw std::invalid_argument("fragmentation sweep needs some positive generator values");

  PencilCache cache(grid, solver);
  SweepResult out;
  for (int k : stripe_counts) {
    const Weight w = checkerboard_rearrangement(cls, k);
    const PrincipalResult pr = cache.solve(w);
    SweepRow row;
    row.stripes = k;
    row.mu1 = mu_tilde(pr);
    row.lambda1 = row.mu1 > 0.0 ? 1.0 / row.mu1 : std::numeric_limits<double>::infinity();
    out.rows.push_back(row);
  }
  const PrincipalResult mean = cache.solve(cls.mean_constant_weight());
  out.mean_no_positive = !has_eigenpair(mean);
  out.mean_mu_tilde = mu_tilde(mean);
  return out;
}

ComonotoneReport comonotone_check(const Weight& w, std::span<const double> q, Direction dir,
                                  double value_tie_tol) {
  if (w.values.size() != q.size())
    throw std::invalid_argument("weight and q have different lengths");
  ComonotoneReport report;
  const double sign = dir == Direction::Increasing ? 1.0 : -1.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i + 1; j < q.size(); ++j) {
      const double dm = w.values[i] - w.values[j];
      if (std::abs(dm) <= value_tie_tol) continue;
      if (sign * (q[i] - q[j]) * dm < 0.0) {
        report.ok = false;
        report.violations.emplace_back(i, j);
      }
    }
  }
  return report;
}

ConvexityReport convexity_probe(const Weight& m, const Weight& q, const std::vector<double>& t_grid,
                                const Grid& grid, const SolverOptions& solver) {
  if (m.values.size() != q.values.size())
    throw std::invalid_argument("weights have different lengths");
  PencilCache cache(grid, solver);
  const double mu_m = cache.mu_tilde_of(m);
  const double mu_q = cache.mu_tilde_of(q);

  ConvexityReport report;
  double dot_mq = 0.0, dot_mm = 0.0, dot_qq = 0.0;
  for (std::size_t e = 0; e < m.values.size(); ++e) {
    dot_mq += m.values[e] * q.values[e];
    dot_mm += m.values[e] * m.values[e];
    dot_qq += q.values[e] * q.values[e];
  }
  report.linearly_independent = dot_mq * dot_mq < (1.0 - 1e-12) * dot_mm * dot_qq;

  if (!t_grid.empty()) report.max_violation = -std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    const double chord = t * mu_m + (1.0 - t) * mu_q;
    const double seg = cache.mu_tilde_of(blend(q, m, t));
    report.max_violation = std::max(report.max_violation, seg - chord);
  }
  if (report.linearly_independent && mu_m > 0.0 && mu_q > 0.0) {
    const double chord = 0.5 * (mu_m + mu_q);
    const double seg = cache.mu_tilde_of(blend(q, m, 0.5));
    report.strictness_margin_half = chord - seg;
  }
  return report;
}

PersistenceThreshold persistence_threshold(const PrincipalResult& r) {
  PersistenceThreshold out;
  if (has_eigenpair(r)) {
    out.d_star = eigenpair(r).mu1;
  } else {
    out.extinct_for_all_d = true;
  }
  return out;
}

}  // namespace eigenweight
