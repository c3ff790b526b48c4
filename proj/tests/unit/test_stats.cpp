#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "relik/errors.hpp"
#include "relik/stats.hpp"

using namespace relik;

// Reference values computed with scipy.special.betainc and scipy.stats.
TEST(Stats, IncompleteBeta) {
  EXPECT_NEAR(incomplete_beta(2, 3, 0.4), 0.5247999999999999, 1e-12);
  EXPECT_NEAR(incomplete_beta(0.5, 0.5, 0.3), 0.36901011956554536, 1e-12);
  EXPECT_NEAR(incomplete_beta(10, 2, 0.9), 0.6973568802000002, 1e-12);
  EXPECT_NEAR(incomplete_beta(1, 1, 0.25), 0.25, 1e-14);
  EXPECT_EQ(incomplete_beta(2, 3, 0.0), 0.0);
  EXPECT_EQ(incomplete_beta(2, 3, 1.0), 1.0);
  EXPECT_THROW(incomplete_beta(0, 1, 0.5), DomainError);
  EXPECT_THROW(incomplete_beta(1, 1, 1.5), DomainError);
}

TEST(Stats, StudentT) {
  EXPECT_NEAR(student_t_cdf(0, 5), 0.5, 1e-14);
  EXPECT_NEAR(student_t_cdf(1.5, 3), 0.8847080673775886, 1e-12);
  EXPECT_NEAR(student_t_cdf(-2.2, 10), 0.02622053422467655, 1e-12);
  EXPECT_NEAR(student_t_cdf(3, 1), 0.8975836176504333, 1e-12);
  EXPECT_THROW(student_t_cdf(1, 0), DomainError);
}

TEST(Stats, Pearson) {
  const std::vector<std::pair<double, double>> a{{1, 2.1}, {2, 3.9}, {3, 6.2},
                                                 {4, 7.8}, {5, 10.5}, {6, 11.7}};
  const auto ra = pearson(a);
  EXPECT_NEAR(ra.r, 0.9969028315335635, 1e-12);
  EXPECT_NEAR(ra.p, 1.4373824043518695e-05, 1e-12);

  const std::vector<std::pair<double, double>> b{{1, 1}, {2, 3}, {3, 2}, {4, 4}};
  const auto rb = pearson(b);
  EXPECT_NEAR(rb.r, 0.8, 1e-12);
  EXPECT_NEAR(rb.p, 0.2, 1e-12);
}

TEST(Stats, PearsonSymmetryAndBounds) {
  std::vector<std::pair<double, double>> pts, swapped, neg;
  for (int i = 0; i < 40; ++i) {
    const double x = std::sin(i * 1.3), y = std::cos(i * 0.7) + 0.3 * x;
    pts.emplace_back(x, y);
    swapped.emplace_back(y, x);
    neg.emplace_back(x, -y);
  }
  const auto r = pearson(pts);
  EXPECT_NEAR(r.r, pearson(swapped).r, 1e-12);
  EXPECT_NEAR(r.r, -pearson(neg).r, 1e-12);
  EXPECT_NEAR(r.p, pearson(neg).p, 1e-12);
  EXPECT_LE(std::abs(r.r), 1.0);
  EXPECT_GE(r.p, 0.0);
  EXPECT_LE(r.p, 1.0);
}

TEST(Stats, PearsonDegenerate) {
  const std::vector<std::pair<double, double>> two{{1, 1}, {2, 2}};
  const std::vector<std::pair<double, double>> flat{{1, 5}, {2, 5}, {3, 5}};
  EXPECT_THROW(pearson(two), DomainError);
  EXPECT_THROW(pearson(flat), DomainError);
  const std::vector<std::pair<double, double>> line{{1, 1}, {2, 2}, {3, 3}};
  const auto r = pearson(line);
  EXPECT_NEAR(r.r, 1.0, 1e-12);
  EXPECT_NEAR(r.p, 0.0, 1e-12);
}
