#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cvsq/phase_space.hpp"
#include "test_support.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

using namespace cvsq;

TEST_CASE("symplectic form algebra") {
  for (int n : {1, 2, 3, 5}) {
    const Eigen::MatrixXd omega = symplectic_form(n);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    CHECK((omega.transpose() + omega).cwiseAbs().maxCoeff() == 0.0);
    CHECK((omega * omega + eye).cwiseAbs().maxCoeff() == 0.0);
    CHECK((omega.transpose() * omega - eye).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(symplectic_form(0), std::invalid_argument);
}

TEST_CASE("commutator form equals h^T Omega g and is antisymmetric") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 4;
    const Eigen::VectorXd h = test_support::random_unit_vector(rng, 2 * n);
    const Eigen::VectorXd g = test_support::random_unit_vector(rng, 2 * n);
    const double direct = commutator_form(h, g);
    CHECK(std::abs(direct - h.dot(symplectic_form(n) * g)) < 1e-14);
    CHECK(std::abs(commutator_form(g, h) + direct) < 1e-14);
  }

  Eigen::VectorXd h = Eigen::VectorXd::Zero(4);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
  h[0] = 1.0;  // x_1
  g[1] = 1.0;  // p_1
  CHECK(commutator_form(h, g) == 1.0);
  CHECK_THROWS_AS(commutator_form(h, Eigen::VectorXd::Zero(6)),
                  std::invalid_argument);
}

TEST_CASE("partition parsing, canonical form, membership") {
  const Partition p = Partition::parse("1,2|3", 3);
  REQUIRE(p.blocks().size() == 2);
  CHECK(p.blocks()[0] == std::vector<int>{0, 1});
  CHECK(p.blocks()[1] == std::vector<int>{2});
  CHECK(p.same_block(0, 1));
  CHECK_FALSE(p.same_block(0, 2));
  CHECK(p.to_string() == "1,2|3");
  CHECK_FALSE(p.is_singleton());
  CHECK_FALSE(p.is_trivial());

  CHECK(Partition::singleton(3).is_singleton());
  CHECK(Partition::singleton(3).to_string() == "1|2|3");
  CHECK(Partition::trivial(3).is_trivial());
  CHECK(Partition::trivial(3).to_string() == "1,2,3");
  // blocks are reordered by first element, modes sorted within a block
  CHECK(Partition::parse("3|2,1", 3).to_string() == "1,2|3");
  CHECK(Partition::parse(" 1 , 2 | 3 ", 3).to_string() == "1,2|3");

  CHECK_THROWS_AS(Partition::parse("1,2", 3), std::invalid_argument);
  CHECK_THROWS_AS(Partition::parse("1,2|2,3", 3), std::invalid_argument);
  CHECK_THROWS_AS(Partition::parse("0,1|2", 3), std::invalid_argument);
  CHECK_THROWS_AS(Partition::parse("1,2|4", 3), std::invalid_argument);
  CHECK_THROWS_AS(Partition::parse("1,,2|3", 3), std::invalid_argument);
  CHECK_THROWS_AS(Partition::parse("1,a|2", 3), std::invalid_argument);
  CHECK_THROWS_AS(Partition::parse("", 3), std::invalid_argument);
}

TEST_CASE("covariance constructor validation") {
  const CovarianceMatrix vac(0.5 * Eigen::MatrixXd::Identity(4, 4));
  CHECK(vac.n_modes() == 2);
  CHECK(vac.dim() == 4);
  CHECK(vac.is_physical());
  // the vacuum saturates the uncertainty bound
  CHECK(std::abs(vac.min_physicality_eigenvalue()) < 1e-12);

  // asymmetry within tolerance is symmetrized away
  Eigen::MatrixXd near = Eigen::MatrixXd::Identity(2, 2);
  near(0, 1) = 1e-12;
  const CovarianceMatrix symmetrized(near);
  CHECK(symmetrized.matrix()(0, 1) == symmetrized.matrix()(1, 0));

  Eigen::MatrixXd skewed = Eigen::MatrixXd::Identity(2, 2);
  skewed(0, 1) = 1e-3;
  CHECK_THROWS_AS(CovarianceMatrix{skewed}, invalid_data);

  Eigen::MatrixXd indefinite = Eigen::MatrixXd::Identity(4, 4);
  indefinite(0, 0) = -0.1;
  CHECK_THROWS_AS(CovarianceMatrix{indefinite}, invalid_data);

  CHECK_THROWS_AS(CovarianceMatrix{Eigen::MatrixXd::Identity(3, 3)},
                  invalid_data);

  CHECK_THROWS_AS(CovarianceMatrix(0.5 * Eigen::MatrixXd::Identity(4, 4),
                                   Eigen::VectorXd::Zero(3)),
                  invalid_data);

  // PSD but tighter than the uncertainty floor: accepted, flagged unphysical
  const CovarianceMatrix tight(0.25 * Eigen::MatrixXd::Identity(2, 2));
  CHECK_FALSE(tight.is_physical());
  CHECK(tight.min_physicality_eigenvalue() < -0.2);
}

TEST_CASE("random physical covariances pass the physicality check") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 3;
    CHECK(test_support::random_physical_covariance(rng, n).is_physical());
  }
}

TEST_CASE("quadratic variance") {
  const CovarianceMatrix vac(0.5 * Eigen::MatrixXd::Identity(4, 4));
  Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
  g[0] = 1.0;
  CHECK(quadratic_variance(vac, g) == 0.5);
  g[2] = 1.0;  // x_1 + x_2 on vacuum
  CHECK(quadratic_variance(vac, g) == 1.0);
  CHECK_THROWS_AS(quadratic_variance(vac, Eigen::VectorXd::Zero(6)),
                  std::invalid_argument);
}

TEST_CASE("remove_correlations zeroes exactly the cross-block blocks") {
  std::mt19937_64 rng(13);
  const CovarianceMatrix gamma =
      test_support::random_physical_covariance(rng, 3);
  const Partition partition = Partition::parse("1,2|3", 3);
  const CovarianceMatrix removed = remove_correlations(gamma, partition);

  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Eigen::Matrix2d original = gamma.matrix().block<2, 2>(2 * i, 2 * j);
      const Eigen::Matrix2d kept = removed.matrix().block<2, 2>(2 * i, 2 * j);
      if (i == j || partition.same_block(i, j)) {
        CHECK((kept - original).cwiseAbs().maxCoeff() == 0.0);
      } else {
        CHECK(kept.cwiseAbs().maxCoeff() == 0.0);
      }
    }
  }

  // removal is idempotent
  const CovarianceMatrix twice = remove_correlations(removed, partition);
  CHECK((twice.matrix() - removed.matrix()).cwiseAbs().maxCoeff() == 0.0);

  // the trivial partition removes nothing
  const CovarianceMatrix same =
      remove_correlations(gamma, Partition::trivial(3));
  CHECK((same.matrix() - gamma.matrix()).cwiseAbs().maxCoeff() == 0.0);

  // a product state is a fixed point of singleton removal
  const CovarianceMatrix product =
      test_support::random_product_covariance(rng, 3);
  const CovarianceMatrix stripped =
      remove_correlations(product, Partition::singleton(3));
  CHECK((stripped.matrix() - product.matrix()).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(remove_correlations(gamma, Partition::singleton(2)),
                  std::invalid_argument);
}

TEST_CASE("remove_correlations preserves the mean") {
  Eigen::VectorXd mean(4);
  mean << 1.0, -2.0, 3.0, 0.5;
  const CovarianceMatrix gamma(0.5 * Eigen::MatrixXd::Identity(4, 4), mean);
  const CovarianceMatrix removed =
      remove_correlations(gamma, Partition::singleton(2));
  REQUIRE(removed.mean().has_value());
  CHECK((*removed.mean() - mean).cwiseAbs().maxCoeff() == 0.0);
}
