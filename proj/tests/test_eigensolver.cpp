#include <doctest.h>

#include <stdexcept>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

#include "eigenweight/assembly.hpp"
#include "eigenweight/eigensolver.hpp"
#include "eigenweight/grid.hpp"

using namespace eigenweight;

namespace {

Grid interval(int n, BcKind bc, std::vector<double> sigma = {}) {
  BcSpec spec{bc, std::move(sigma)};
  if (bc == BcKind::Robin && spec.sigma.empty()) spec.sigma = {1.0};
  return build_grid({1, {0.0, 0.0}, {1.0, 0.0}}, n, spec);
}

Weight constant_weight(const Grid& g, double c) {
  return {std::vector<double>(static_cast<std::size_t>(g.num_elements()), c), g.element_measure};
}

Weight random_sign_changing(std::mt19937_64& rng, const Grid& g) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Weight w = constant_weight(g, 0.0);
  for (auto& v : w.values) v = unit(rng);
  w.values.front() = std::abs(w.values.front()) + 0.5;  // guarantee a positive part
  return w;
}

Eigen::VectorXd free_part(const StiffnessForm& K, const Eigen::VectorXd& u_full) {
  return K.restrict_to_free(u_full);
}

}  // namespace

TEST_CASE("constant weight on the unit interval reproduces the sine mode") {
  const Grid g = interval(64, BcKind::Dirichlet);
  const StiffnessForm K = assemble_stiffness(g);
  const WeightedMassForm M = assemble_weighted_mass(g, constant_weight(g, 1.0));
  const PrincipalResult r = principal_eigenpair(K, M);
  REQUIRE(has_eigenpair(r));
  const EigenPair& pair = eigenpair(r);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(std::abs(pair.lambda1 - pi2) <= 0.01);
  CHECK(pair.mu1 == doctest::Approx(1.0 / pair.lambda1));
  CHECK(pair.residual <= 1e-10);
}

TEST_CASE("nonpositive weights have no positive eigenvalue") {
  const Grid g = interval(16, BcKind::Dirichlet);
  const StiffnessForm K = assemble_stiffness(g);
  const PrincipalResult r = principal_eigenpair(K, assemble_weighted_mass(g, constant_weight(g, -1.0)));
  REQUIRE(!has_eigenpair(r));
  CHECK(std::get<NoPositiveEigenvalue>(r).diagnostic.find("no positive part") != std::string::npos);
  CHECK(mu_tilde(r) == 0.0);
}

TEST_CASE("coarse mesh can miss the positive branch, reported as a diagnostic") {
  // one free node, weight +1 / -1: the single Rayleigh quotient is exactly 0
  const Grid g = interval(2, BcKind::Dirichlet);
  const StiffnessForm K = assemble_stiffness(g);
  const PrincipalResult r =
      principal_eigenpair(K, assemble_weighted_mass(g, {{1.0, -1.0}, g.element_measure}));
  REQUIRE(!has_eigenpair(r));
  CHECK(std::get<NoPositiveEigenvalue>(r).diagnostic.find("coarse") != std::string::npos);
}

TEST_CASE("principal eigenfunction of an indefinite weight is one-signed") {
  const Grid g = interval(40, BcKind::Dirichlet);
  Weight w = constant_weight(g, -1.0);
  for (int e = 10; e < 30; ++e) w.values[static_cast<std::size_t>(e)] = 1.0;
  const StiffnessForm K = assemble_stiffness(g);
  const PrincipalResult r = principal_eigenpair(K, assemble_weighted_mass(g, w));
  REQUIRE(has_eigenpair(r));
  const Eigen::VectorXd uf = free_part(K, eigenpair(r).u);
  CHECK(uf.minCoeff() > 0.0);
}

TEST_CASE("normalization pair") {
  std::mt19937_64 rng(23);
  const Grid g = interval(40, BcKind::Robin, {1.0});
  const StiffnessForm K = assemble_stiffness(g);
  const WeightedMassForm M = assemble_weighted_mass(g, random_sign_changing(rng, g));
  const PrincipalResult r = principal_eigenpair(K, M);
  REQUIRE(has_eigenpair(r));
  const EigenPair& pair = eigenpair(r);
  const Eigen::VectorXd uf = free_part(K, pair.u);
  CHECK(std::abs(std::sqrt(uf.dot(K.K * uf)) - 1.0) <= 1e-12);
  CHECK(std::abs(uf.dot(M.M * uf) - pair.mu1) <= 1e-10);
}

TEST_CASE("rayleigh quotient is maximized by the eigenfunction") {
  std::mt19937_64 rng(29);
  const Grid g = interval(30, BcKind::Dirichlet);
  const StiffnessForm K = assemble_stiffness(g);
  const WeightedMassForm M = assemble_weighted_mass(g, random_sign_changing(rng, g));
  const PrincipalResult r = principal_eigenpair(K, M);
  REQUIRE(has_eigenpair(r));
  const EigenPair& pair = eigenpair(r);

  CHECK(rayleigh_quotient(pair.u, K, M) == doctest::Approx(pair.mu1).epsilon(1e-10));

  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd f(K.free_count());
    for (int i = 0; i < f.size(); ++i) f[i] = gauss(rng);
    CHECK(rayleigh_quotient(f, K, M) <= pair.mu1 + 1e-12);
  }

  // a single node inside a positive cell gives a positive quotient
  Weight pos = constant_weight(g, -1.0);
  pos.values[15] = 2.0;
  const WeightedMassForm Mp = assemble_weighted_mass(g, pos);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(K.free_count());
  f[g.free_of_node[15]] = 1.0;
  CHECK(rayleigh_quotient(f, K, Mp) > 0.0);

  CHECK_THROWS_AS(rayleigh_quotient(Eigen::VectorXd::Zero(K.free_count()), K, M),
                  std::invalid_argument);
}

TEST_CASE("dense spectrum oracle: sign regimes") {
  const Grid g = interval(50, BcKind::Dirichlet);
  const StiffnessForm K = assemble_stiffness(g);
  SUBCASE("positive weight has no negative branch") {
    const SpectrumReport rep = dense_spectrum_oracle(K, assemble_weighted_mass(g, constant_weight(g, 1.0)));
    CHECK(rep.negative.empty());
    CHECK(rep.positive.size() == 49);
    CHECK(rep.positive_lambdas().front() == doctest::Approx(1.0 / rep.positive.front()));
  }
  SUBCASE("sign-changing weight has both branches") {
    std::mt19937_64 rng(31);
    const SpectrumReport rep =
        dense_spectrum_oracle(K, assemble_weighted_mass(g, random_sign_changing(rng, g)));
    CHECK(!rep.positive.empty());
    CHECK(!rep.negative.empty());
    // ordering conventions: positive descending, negative most negative first
    for (std::size_t i = 1; i < rep.positive.size(); ++i)
      CHECK(rep.positive[i] <= rep.positive[i - 1]);
    for (std::size_t i = 1; i < rep.negative.size(); ++i)
      CHECK(rep.negative[i] >= rep.negative[i - 1]);
  }
}

TEST_CASE("oracle agrees with the principal solver") {
  std::mt19937_64 rng(37);
  const Grid g = interval(50, BcKind::Dirichlet);
  const StiffnessForm K = assemble_stiffness(g);
  const WeightedMassForm M = assemble_weighted_mass(g, random_sign_changing(rng, g));
  const PrincipalResult r = principal_eigenpair(K, M);
  const SpectrumReport rep = dense_spectrum_oracle(K, M);
  REQUIRE(has_eigenpair(r));
  CHECK(std::abs(eigenpair(r).mu1 - rep.positive.front()) <= 1e-10);
}

TEST_CASE("discrete simplicity: the top eigenvalue is separated") {
  std::mt19937_64 rng(41);
  const Grid g = interval(100, BcKind::Dirichlet);
  const StiffnessForm K = assemble_stiffness(g);
  for (int trial = 0; trial < 5; ++trial) {
    const SpectrumReport rep =
        dense_spectrum_oracle(K, assemble_weighted_mass(g, random_sign_changing(rng, g)));
    REQUIRE(rep.positive.size() >= 2);
    CHECK(rep.positive[0] - rep.positive[1] > 0.0);
  }
}

TEST_CASE("Krylov path agrees with the dense oracle beyond the dense threshold") {
  std::mt19937_64 rng(43);
  const Grid g = interval(600, BcKind::Dirichlet);  // 599 free nodes: Lanczos path
  const StiffnessForm K = assemble_stiffness(g);
  const WeightedMassForm M = assemble_weighted_mass(g, random_sign_changing(rng, g));
  const PrincipalResult r = principal_eigenpair(K, M);
  REQUIRE(has_eigenpair(r));
  const EigenPair& pair = eigenpair(r);
  CHECK(pair.residual <= 1e-10);
  CHECK(free_part(K, pair.u).minCoeff() > 0.0);
  const SpectrumReport rep = dense_spectrum_oracle(K, M);
  CHECK(std::abs(pair.mu1 - rep.positive.front()) <= 1e-9 * std::abs(pair.mu1) + 1e-13);
}

TEST_CASE("gateaux derivative against central finite differences") {
  std::mt19937_64 rng(47);
  const Grid g = interval(50, BcKind::Dirichlet);
  PencilCache cache(g);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const Weight m = random_sign_changing(rng, g);
    const PrincipalResult r = cache.solve(m);
    REQUIRE(has_eigenpair(r));
    const std::vector<double> grad = gateaux_derivative(g, eigenpair(r));

    std::vector<double> v(m.values.size());
    for (auto& x : v) x = unit(rng);
    double exact = 0.0;
    for (std::size_t e = 0; e < v.size(); ++e) exact += grad[e] * v[e];

    const double eps = 1e-5;
    Weight plus = m, minus = m;
    for (std::size_t e = 0; e < v.size(); ++e) {
      plus.values[e] += eps * v[e];
      minus.values[e] -= eps * v[e];
    }
    const double fd = (cache.mu_tilde_of(plus) - cache.mu_tilde_of(minus)) / (2.0 * eps);
    CHECK(std::abs(fd - exact) / std::max(std::abs(exact), 1e-12) < 1e-5);
  }
}

TEST_CASE("a tampered derivative is caught by the finite-difference check") {
  // dropping the cross term of the element integral must blow the
  // relative error far past the acceptance threshold
  std::mt19937_64 rng(49);
  const Grid g = interval(50, BcKind::Dirichlet);
  PencilCache cache(g);
  const Weight m = random_sign_changing(rng, g);
  const PrincipalResult r = cache.solve(m);
  REQUIRE(has_eigenpair(r));
  const Eigen::VectorXd& u = eigenpair(r).u;
  const double h = g.mesh_width(0);
  std::vector<double> tampered(m.values.size());
  for (int e = 0; e < g.num_elements(); ++e) {
    const auto nodes = g.element_nodes(e);
    const double a = u[nodes[0]], b = u[nodes[1]];
    tampered[static_cast<std::size_t>(e)] = (h / 3.0) * (a * a + b * b);  // cross term dropped
  }
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> v(m.values.size());
  for (auto& x : v) x = unit(rng);
  double wrong = 0.0;
  for (std::size_t e = 0; e < v.size(); ++e) wrong += tampered[e] * v[e];
  const double eps = 1e-5;
  Weight plus = m, minus = m;
  for (std::size_t e = 0; e < v.size(); ++e) {
    plus.values[e] += eps * v[e];
    minus.values[e] -= eps * v[e];
  }
  const double fd = (cache.mu_tilde_of(plus) - cache.mu_tilde_of(minus)) / (2.0 * eps);
  CHECK(std::abs(fd - wrong) / std::max(std::abs(wrong), 1e-12) > 1e-3);
}

TEST_CASE("Euler identity and the zero direction") {
  std::mt19937_64 rng(53);
  const Grid g = interval(50, BcKind::Robin, {1.0});
  PencilCache cache(g);
  const Weight m = random_sign_changing(rng, g);
  const PrincipalResult r = cache.solve(m);
  REQUIRE(has_eigenpair(r));
  const std::vector<double> grad = gateaux_derivative(g, eigenpair(r));
  double euler = 0.0, zero = 0.0;
  for (std::size_t e = 0; e < grad.size(); ++e) {
    euler += grad[e] * m.values[e];
    zero += grad[e] * 0.0;
  }
  CHECK(std::abs(euler - eigenpair(r).mu1) <= 1e-10);
  CHECK(zero == 0.0);
}

TEST_CASE("homogeneity of mu1") {
  std::mt19937_64 rng(59);
  const Grid g = interval(40, BcKind::Dirichlet);
  const Weight m = random_sign_changing(rng, g);
  for (double alpha : {1.0, 2.0, 3.7}) {
    const HomogeneityReport rep = homogeneity_check(g, m, alpha);
    CHECK(rep.pass);
    CHECK(rep.abs_error <= rep.bound);
  }
  CHECK_THROWS_AS(homogeneity_check(g, m, -1.0), std::invalid_argument);
}

TEST_CASE("sequential stability along the averaging sequence") {
  std::mt19937_64 rng(61);
  const Grid g = interval(40, BcKind::Dirichlet);
  PencilCache cache(g);
  const Weight m = random_sign_changing(rng, g);
  const Weight q = random_sign_changing(rng, g);
  const double mu_m = cache.mu_tilde_of(m);
  REQUIRE(mu_m > 0.0);
  double prev_err = std::numeric_limits<double>::infinity();
  for (int j : {2, 4, 8, 16, 32, 64}) {
    Weight mj = m;
    for (std::size_t e = 0; e < mj.values.size(); ++e)
      mj.values[e] = (1.0 - 1.0 / j) * m.values[e] + (1.0 / j) * q.values[e];
    const double err = std::abs(cache.mu_tilde_of(mj) - mu_m);
    CHECK(err <= prev_err + 1e-12);
    prev_err = err;
  }
  CHECK(prev_err <= 0.05 * std::max(1.0, mu_m));
}

TEST_CASE("2D constant weight approaches the first box mode at order 2") {
  const double target = 2.0 * std::numbers::pi * std::numbers::pi;
  std::vector<double> errors;
  for (int n : {8, 16}) {
    const Grid g = build_grid({2, {0.0, 0.0}, {1.0, 1.0}}, n, {BcKind::Dirichlet, {}});
    const StiffnessForm K = assemble_stiffness(g);
    const Weight ones{std::vector<double>(static_cast<std::size_t>(g.num_elements()), 1.0),
                      g.element_measure};
    const PrincipalResult r = principal_eigenpair(K, assemble_weighted_mass(g, ones));
    REQUIRE(has_eigenpair(r));
    errors.push_back(std::abs(eigenpair(r).lambda1 - target));
  }
  CHECK(errors[1] < errors[0]);
  CHECK(errors[0] / errors[1] > 3.3);
  CHECK(errors[0] / errors[1] < 4.7);
}

TEST_CASE("2D Robin solve has a positive eigenfunction") {
  const Grid g = build_grid({2, {0.0, 0.0}, {1.0, 1.0}}, 6, {BcKind::Robin, {1.0}});
  const StiffnessForm K = assemble_stiffness(g);
  Weight w{std::vector<double>(36, -0.3), g.element_measure};
  for (int e = 10; e < 26; ++e) w.values[static_cast<std::size_t>(e)] = 1.0;
  const PrincipalResult r = principal_eigenpair(K, assemble_weighted_mass(g, w));
  REQUIRE(has_eigenpair(r));
  CHECK(eigenpair(r).u.minCoeff() > 0.0);  // all nodes are free under Robin
  CHECK(eigenpair(r).mu1 > 0.0);
}

TEST_CASE("non-SPD stiffness is rejected") {
  const Grid g = interval(8, BcKind::Dirichlet);
  StiffnessForm K = assemble_stiffness(g);
  const WeightedMassForm M = assemble_weighted_mass(g, constant_weight(g, 1.0));
  Eigen::SparseMatrix<double> bad = K.K;
  bad.coeffRef(0, 0) = -100.0;
  K.K = bad;
  CHECK_THROWS_AS(principal_eigenpair(K, M), std::runtime_error);
}
