#include "eigenweight/eigensolver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace eigenweight {

double mu_tilde(const PrincipalResult& r) {
  return has_eigenpair(r) ? eigenpair(r).mu1 : 0.0;
}

std::vector<double> SpectrumReport::positive_lambdas() const {
  std::vector<double> l;
  l.reserve(positive.size());
  for (double mu : positive) l.push_back(1.0 / mu);
  return l;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

constexpr std::uint64_t kLanczosSeed = 0x2545f4914f6cdd1dULL;

struct TopResult {
  double theta_top = 0.0;
  double theta_min = 0.0;
  Eigen::VectorXd u_free;  // empty unless requested and theta_top resolved
  double residual = 0.0;
};

double relative_residual(const SpMat& K, const SpMat& M, const Eigen::VectorXd& u, double theta) {
  const Eigen::VectorXd ku = K * u;
  const Eigen::VectorXd r = M * u - theta * ku;
  return r.norm() / ku.norm();
}

/// Factorization of one stiffness matrix, reused across weighted-mass
/// right-hand sides. Dense Cholesky with full symmetric reduction below
/// the threshold, sparse Cholesky + Lanczos above it.
class Factorization {
 public:
  Factorization(const SpMat& K, const SolverOptions& opts) : opts_(opts), K_(K) {
    dense_ = K.rows() <= opts.dense_threshold;
    if (dense_) {
      Kd_ = Eigen::MatrixXd(K);
      llt_dense_.compute(Kd_);
      if (llt_dense_.info() != Eigen::Success)
        throw std::runtime_error("stiffness form is not symmetric positive definite");
    } else {
      llt_sparse_ = std::make_unique<Eigen::SimplicialLLT<SpMat>>();
      llt_sparse_->compute(K);
      if (llt_sparse_->info() != Eigen::Success)
        throw std::runtime_error("stiffness form is not symmetric positive definite");
    }
  }

  bool is_dense() const { return dense_; }
  const SpMat& K() const { return K_; }

  /// S = L^-1 M L^-T, the symmetric standard form of the pencil.
  Eigen::MatrixXd to_standard(const SpMat& M) const {
    Eigen::MatrixXd Y = llt_dense_.matrixL().solve(Eigen::MatrixXd(M));
    Eigen::MatrixXd S = llt_dense_.matrixL().solve(Y.transpose());
    return 0.5 * (S + S.transpose());
  }

  Eigen::VectorXd from_standard(const Eigen::VectorXd& y) const {
    return llt_dense_.matrixU().solve(y);
  }

  TopResult top(const SpMat& M, bool want_vector) const {
    return dense_ ? top_dense(M, want_vector) : top_lanczos(M, want_vector);
  }

  static double dense_top_eigenvalue(const Eigen::MatrixXd& S) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(S.rows() - 1);
  }

 private:
  TopResult top_dense(const SpMat& M, bool want_vector) const {
    const Eigen::MatrixXd S = to_standard(M);
    TopResult out;
    if (!want_vector) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
      out.theta_top = es.eigenvalues()(S.rows() - 1);
      out.theta_min = es.eigenvalues()(0);
      return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    out.theta_top = es.eigenvalues()(S.rows() - 1);
    out.theta_min = es.eigenvalues()(0);
    Eigen::VectorXd u = from_standard(es.eigenvectors().col(S.rows() - 1));
    u /= std::sqrt(u.dot(K_ * u));
    out.residual = relative_residual(K_, M, u, out.theta_top);
    out.u_free = std::move(u);
    return out;
  }

  // Lanczos in the K inner product on K^-1 M with full reorthogonalization.
  // The Ritz values of the growing tridiagonal matrix approach both
  // spectral ends, so the largest algebraic eigenvalue is resolved even
  // when the negative branch dominates in magnitude.
  TopResult top_lanczos(const SpMat& M, bool want_vector) const {
    const Eigen::Index n = K_.rows();
    const int max_basis = static_cast<int>(std::min<Eigen::Index>(n, 400));

    std::mt19937_64 rng(kLanczosSeed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = gauss(rng);

    int matvecs = 0;
    double last_residual = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart < 64; ++restart) {
      Eigen::VectorXd kv = K_ * v;
      double nrm = std::sqrt(v.dot(kv));
      v /= nrm;
      kv /= nrm;

      std::vector<Eigen::VectorXd> V{v}, KV{kv};
      std::vector<double> alpha, beta;

      for (int j = 0; j < max_basis; ++j) {
        if (++matvecs > opts_.max_iter) {
          std::ostringstream msg;
          msg << "principal eigensolve did not converge within max_iter=" << opts_.max_iter
              << " operator applications (last relative residual " << last_residual << ")";
          throw std::runtime_error(msg.str());
        }
        Eigen::VectorXd w = llt_sparse_->solve(M * V[static_cast<std::size_t>(j)]);
        double a_j = 0.0;
        for (int pass = 0; pass < 2; ++pass) {
          for (int i = 0; i <= j; ++i) {
            const double c = KV[static_cast<std::size_t>(i)].dot(w);
            if (pass == 0 && i == j) a_j = c;
            w -= c * V[static_cast<std::size_t>(i)];
          }
        }
        alpha.push_back(a_j);

        Eigen::VectorXd kw = K_ * w;
        const double b2 = w.dot(kw);
        const double b_j = b2 > 0.0 ? std::sqrt(b2) : 0.0;
        const bool breakdown = !(b_j > 1e-14 * std::abs(a_j) + 1e-300);

        const int dim = j + 1;
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) T(i, i) = alpha[static_cast<std::size_t>(i)];
        for (int i = 0; i + 1 < dim; ++i)
          T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        const double theta = es.eigenvalues()(dim - 1);
        const Eigen::VectorXd y = es.eigenvectors().col(dim - 1);
        const double est = breakdown ? 0.0 : b_j * std::abs(y(dim - 1));

        if (est <= opts_.tol * std::max(std::abs(theta), 1e-300) || breakdown || dim == n) {
          Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
          for (int i = 0; i < dim; ++i) u += y(i) * V[static_cast<std::size_t>(i)];
          u /= std::sqrt(u.dot(K_ * u));
          last_residual = relative_residual(K_, M, u, theta);
          if (last_residual <= opts_.tol || breakdown || dim == n) {
            TopResult out;
            out.theta_top = theta;
            out.theta_min = es.eigenvalues()(0);
            out.residual = last_residual;
            if (want_vector) out.u_free = std::move(u);
            return out;
          }
          if (dim == max_basis) {
            v = std::move(u);  // restart from the best Ritz vector
            break;
          }
        } else if (dim == max_basis) {
          Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
          for (int i = 0; i < dim; ++i) u += y(i) * V[static_cast<std::size_t>(i)];
          v = std::move(u);
          break;
        }

        if (breakdown) break;
        beta.push_back(b_j);
        V.push_back(w / b_j);
        KV.push_back(kw / b_j);
      }
    }
    std::ostringstream msg;
    msg << "principal eigensolve stalled after restarts (last relative residual "
        << last_residual << ")";
    throw std::runtime_error(msg.str());
  }

  SolverOptions opts_;
  SpMat K_;
  bool dense_ = true;
  Eigen::MatrixXd Kd_;
  Eigen::LLT<Eigen::MatrixXd> llt_dense_;
  std::unique_ptr<Eigen::SimplicialLLT<SpMat>> llt_sparse_;
};

PrincipalResult principal_from(const Factorization& fact, const StiffnessForm& K,
                               const WeightedMassForm& M, const SolverOptions& opts) {
  if (M.weight.values.empty())
    throw std::invalid_argument("weighted mass form carries no weight");
  if (M.M.rows() != K.K.rows())
    throw std::invalid_argument("stiffness and mass forms have different dimensions");

  if (M.weight.max_value() <= 0.0)
    return NoPositiveEigenvalue{
        "the weight has no positive part, so the pencil has no positive eigenvalues"};

  TopResult top = fact.top(M.M, /*want_vector=*/true);
  if (top.theta_top <= opts.tol) {
    std::ostringstream msg;
    msg << "computed top of the spectrum is " << top.theta_top << " (bottom " << top.theta_min
        << ") although the weight has a positive part; the discretization may be too coarse "
           "to resolve the positive branch";
    return NoPositiveEigenvalue{msg.str()};
  }
  if (top.residual > opts.tol) {
    std::ostringstream msg;
    msg << "eigenresidual " << top.residual << " exceeds tol " << opts.tol;
    throw std::runtime_error(msg.str());
  }

  Eigen::VectorXd u = std::move(top.u_free);
  double s = u.sum();
  if (s == 0.0) {
    Eigen::Index imax = 0;
    u.cwiseAbs().maxCoeff(&imax);
    s = u[imax];
  }
  if (s < 0.0) u = -u;
  if (!(u.minCoeff() > 0.0))
    throw std::runtime_error(
        "principal eigenfunction is not strictly positive at every free node; "
        "refusing to clamp (solver failure or pathological mesh)");

  EigenPair pair;
  pair.mu1 = top.theta_top;
  pair.lambda1 = 1.0 / top.theta_top;
  pair.residual = top.residual;
  pair.u = K.expand_to_full(u);
  return pair;
}

}  // namespace

PrincipalResult principal_eigenpair(const StiffnessForm& K, const WeightedMassForm& M,
                                    const SolverOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  Factorization fact(K.K, opts);
  return principal_from(fact, K, M, opts);
}

double rayleigh_quotient(const Eigen::VectorXd& f, const StiffnessForm& K,
                         const WeightedMassForm& M) {
  Eigen::VectorXd g;
  if (f.size() == K.K.rows())
    g = f;
  else if (f.size() == K.node_count)
    g = K.restrict_to_free(f);
  else
    throw std::invalid_argument("vector length matches neither the free nor the full node count");
  const double denom = g.dot(K.K * g);
  if (!(denom > 0.0)) throw std::invalid_argument("rayleigh quotient of the zero vector");
  return g.dot(M.M * g) / denom;
}

SpectrumReport dense_spectrum_oracle(const StiffnessForm& K, const WeightedMassForm& M) {
  if (K.K.rows() > 1000)
    throw std::invalid_argument("dense spectrum oracle is limited to 1000 free nodes");
  SolverOptions opts;
  opts.dense_threshold = 1000;
  Factorization fact(K.K, opts);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fact.to_standard(M.M), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending

  SpectrumReport report;
  const double tiny = 1e-14 * std::max(1.0, std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1))));
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > tiny)
      report.positive.push_back(ev(i));
    else if (ev(i) < -tiny)
      report.negative.push_back(ev(i));
    else
      ++report.zero_count;
  }
  std::sort(report.positive.begin(), report.positive.end(), std::greater<double>());
  std::sort(report.negative.begin(), report.negative.end());  // most negative first
  return report;
}

std::vector<double> gateaux_derivative(const Grid& grid, const EigenPair& pair) {
  return element_square_integrals(grid, pair.u);
}

HomogeneityReport homogeneity_check(const Grid& grid, const Weight& m, double alpha,
                                    const SolverOptions& opts) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  const StiffnessForm K = assemble_stiffness(grid);
  const PrincipalResult base = principal_eigenpair(K, assemble_weighted_mass(grid, m), opts);
  if (!has_eigenpair(base))
    throw std::invalid_argument("homogeneity check needs mu1(m) > 0");

  Weight scaled = m;
  for (double& v : scaled.values) v *= alpha;
  const PrincipalResult sc = principal_eigenpair(K, assemble_weighted_mass(grid, scaled), opts);

  HomogeneityReport rep;
  rep.alpha = alpha;
  rep.mu_base = eigenpair(base).mu1;
  rep.mu_scaled = mu_tilde(sc);
  rep.abs_error = std::abs(rep.mu_scaled - alpha * rep.mu_base);
  rep.bound = 1e-12 * alpha * rep.mu_base;
  rep.pass = rep.abs_error <= rep.bound;
  return rep;
}

// ---------------------------------------------------------------------------
// PencilCache

struct PencilCache::Impl {
  Impl(const SpMat& K, const SolverOptions& opts) : fact(K, opts) {}
  Factorization fact;
};

PencilCache::PencilCache(const Grid& grid, SolverOptions opts)
    : grid_(grid), stiffness_(assemble_stiffness(grid)), opts_(opts),
      impl_(std::make_unique<Impl>(stiffness_.K, opts)) {}

PencilCache::~PencilCache() = default;
PencilCache::PencilCache(PencilCache&&) noexcept = default;
PencilCache& PencilCache::operator=(PencilCache&&) noexcept = default;

PrincipalResult PencilCache::solve(const Weight& m) const {
  return principal_from(impl_->fact, stiffness_, assemble_weighted_mass(grid_, m), opts_);
}

double PencilCache::mu_tilde_of(const Weight& m) const {
  if (m.max_value() <= 0.0) return 0.0;
  const WeightedMassForm M = assemble_weighted_mass(grid_, m);
  const TopResult top = impl_->fact.top(M.M, /*want_vector=*/false);
  return std::max(top.theta_top, 0.0);
}

struct PencilCache::Segment::Impl {
  const Factorization* fact = nullptr;
  SolverOptions opts;
  std::vector<double> values_a, values_b;
  double element_measure = 1.0;
  // dense path: standard forms of the endpoints, combined per evaluation
  bool dense = true;
  Eigen::MatrixXd Sa, Sb;
  // sparse path: endpoint mass matrices
  SpMat Ma, Mb;
};

PencilCache::Segment::Segment(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
PencilCache::Segment::~Segment() = default;
PencilCache::Segment::Segment(Segment&&) noexcept = default;

PencilCache::Segment PencilCache::segment(const Weight& a, const Weight& b) const {
  if (a.values.size() != b.values.size())
    throw std::invalid_argument("segment endpoints live on different grids");
  auto impl = std::make_unique<Segment::Impl>();
  impl->fact = &impl_->fact;
  impl->opts = opts_;
  impl->values_a = a.values;
  impl->values_b = b.values;
  impl->element_measure = a.element_measure;
  impl->dense = impl_->fact.is_dense();
  const WeightedMassForm Ma = assemble_weighted_mass(grid_, a);
  const WeightedMassForm Mb = assemble_weighted_mass(grid_, b);
  if (impl->dense) {
    impl->Sa = impl_->fact.to_standard(Ma.M);
    impl->Sb = impl_->fact.to_standard(Mb.M);
  } else {
    impl->Ma = Ma.M;
    impl->Mb = Mb.M;
  }
  return Segment(std::move(impl));
}

double PencilCache::Segment::mu_tilde_at(double t) const {
  const auto& im = *impl_;
  double maxval = -std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < im.values_a.size(); ++e)
    maxval = std::max(maxval, (1.0 - t) * im.values_a[e] + t * im.values_b[e]);
  if (maxval <= 0.0) return 0.0;
  if (im.dense) {
    const Eigen::MatrixXd S = (1.0 - t) * im.Sa + t * im.Sb;
    return std::max(Factorization::dense_top_eigenvalue(S), 0.0);
  }
  const SpMat M = ((1.0 - t) * im.Ma + t * im.Mb).pruned();
  const TopResult top = im.fact->top(M, /*want_vector=*/false);
  return std::max(top.theta_top, 0.0);
}

}  // namespace eigenweight
