#include "rodo/eval.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace rodo;

namespace {

std::vector<Pose2d> toy_gt() { return {Pose2d(0, 0, 0), Pose2d(1, 0, 0), Pose2d(2, 0, 0)}; }
std::vector<Pose2d> toy_est() { return {Pose2d(0, 0, 0), Pose2d(1, 0.1, 0), Pose2d(2, 0, 0.05)}; }

std::vector<Pose2d> wiggly_path(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> step(0, 0.05);
  std::vector<Pose2d> out{Pose2d()};
  for (int i = 1; i < n; ++i) out.push_back(out.back() * Pose2d(1.0 + step(rng), step(rng), step(rng)));
  return out;
}

std::vector<Pose2d> rigid_apply(const Pose2d& t, const std::vector<Pose2d>& poses) {
  std::vector<Pose2d> out;
  for (const Pose2d& p : poses) out.push_back(t * p);
  return out;
}

// Straight from the definition: relative motions, compared component-wise with explicit trig.
double rpe_reference(const std::vector<Pose2d>& est, const std::vector<Pose2d>& gt, int d) {
  double sum = 0;
  int n = 0;
  for (std::size_t i = 0; i + static_cast<std::size_t>(d) < est.size(); ++i) {
    const auto rel = [](const Pose2d& a, const Pose2d& b) {
      const double c = std::cos(a.theta()), s = std::sin(a.theta());
      const double dx = b.x() - a.x(), dy = b.y() - a.y();
      return Eigen::Vector3d(c * dx + s * dy, -s * dx + c * dy, b.theta() - a.theta());
    };
    const Eigen::Vector3d g = rel(gt[i], gt[i + static_cast<std::size_t>(d)]);
    const Eigen::Vector3d e = rel(est[i], est[i + static_cast<std::size_t>(d)]);
    const double c = std::cos(g(2)), s = std::sin(g(2));
    const double ex = c * (e(0) - g(0)) + s * (e(1) - g(1));
    const double ey = -s * (e(0) - g(0)) + c * (e(1) - g(1));
    sum += ex * ex + ey * ey;
    ++n;
  }
  return 100 * std::sqrt(sum / n);
}

}  // namespace

TEST(Metrics, ToyRpe) { EXPECT_NEAR(rpe_cm(toy_est(), toy_gt(), 1), 10.0, 1e-9); }

TEST(Metrics, ToyAte) { EXPECT_NEAR(ate_m(toy_est(), toy_gt()), 0.1 * std::sqrt(2.0) / 3.0, 1e-9); }

TEST(Metrics, ToyKitti) {
  const std::vector<double> lengths{1.0, 2.0};
  const KittiErrors k = kitti_errors(toy_est(), toy_gt(), lengths);
  ASSERT_EQ(k.segments.size(), 3u);
  EXPECT_NEAR(k.translation_percent, 100.0 * 0.2 / 3.0, 1e-9);
  EXPECT_NEAR(k.deg_per_100m, 0.025 * 100 * 180 / std::numbers::pi, 1e-9);
}

TEST(Metrics, TwoPoseRpe) {
  const std::vector<Pose2d> gt{Pose2d(), Pose2d(1, 0, 0)};
  const std::vector<Pose2d> est{Pose2d(), Pose2d(1.05, 0, 0)};
  EXPECT_NEAR(rpe_cm(est, gt, 1), 5.0, 1e-9);
}

TEST(Metrics, KittiProportionalDrift) {
  std::vector<Pose2d> gt, est;
  for (int i = 0; i <= 1000; ++i) {
    gt.emplace_back(i, 0, 0);
    est.emplace_back(1.01 * i, 0, 0);
  }
  const KittiErrors k = kitti_errors(est, gt, kitti_segment_lengths());
  EXPECT_NEAR(k.translation_percent, 1.0, 1e-6);
  EXPECT_NEAR(k.deg_per_100m, 0.0, 1e-12);
}

TEST(Metrics, PerfectEstimateIsZero) {
  std::mt19937_64 rng(1);
  const auto gt = wiggly_path(rng, 300);
  EXPECT_EQ(rpe_cm(gt, gt, 1), 0.0);
  EXPECT_NEAR(ate_m(gt, gt), 0.0, 1e-12);
  const std::vector<double> lengths{50, 100};
  const KittiErrors k = kitti_errors(gt, gt, lengths);
  EXPECT_EQ(k.translation_percent, 0.0);
  EXPECT_EQ(k.deg_per_100m, 0.0);
}

TEST(Metrics, GaugeInvariances) {
  std::mt19937_64 rng(2);
  const auto gt = wiggly_path(rng, 300);
  const Pose2d g(12, -7, 2.2);
  const auto moved = rigid_apply(g, gt);
  EXPECT_NEAR(rpe_cm(moved, gt, 1), 0.0, 1e-9);
  EXPECT_NEAR(ate_m(moved, gt), 0.0, 1e-9);
  const std::vector<double> lengths{50, 100};
  EXPECT_NEAR(kitti_errors(moved, gt, lengths).translation_percent, 0.0, 1e-9);
  std::vector<Pose2d> offset;
  for (const Pose2d& p : gt) offset.emplace_back(p.translation() + Eigen::Vector2d(3, 4), p.theta());
  EXPECT_NEAR(kitti_errors(offset, gt, lengths).translation_percent, 0.0, 1e-9);
  EXPECT_NEAR(kitti_errors(offset, gt, lengths).deg_per_100m, 0.0, 1e-9);

  const auto noisy = wiggly_path(rng, 300);
  EXPECT_NEAR(ate_m(rigid_apply(g, noisy), gt), ate_m(noisy, gt), 1e-9);
}

TEST(Metrics, RpeMatchesReference) {
  std::mt19937_64 rng(3);
  const auto gt = wiggly_path(rng, 200);
  const auto est = wiggly_path(rng, 200);
  for (int d : {1, 2, 7}) EXPECT_NEAR(rpe_cm(est, gt, d), rpe_reference(est, gt, d), 1e-9);
}

TEST(Metrics, AteMatchesGridSearchOnSquare) {
  std::vector<Pose2d> gt;
  for (int i = 0; i < 100; ++i) {
    const int side = i / 25, k = i % 25;
    const double s = 0.4 * k;
    const Eigen::Vector2d p = side == 0 ? Eigen::Vector2d(s, 0) : side == 1 ? Eigen::Vector2d(10, s)
                            : side == 2 ? Eigen::Vector2d(10 - s, 10) : Eigen::Vector2d(0, 10 - s);
    gt.emplace_back(p, 0.0);
  }
  std::vector<Pose2d> est = rigid_apply(Pose2d(1.5, -0.7, 0.2), gt);
  est[37] = Pose2d(est[37].translation() + Eigen::Vector2d(0.6, 0.8), 0);
  EXPECT_NEAR(ate_m(est, gt), oracle::grid_search_ate(est, gt), 1e-3);
  EXPECT_GE(ate_m(est, gt), 0.0);
}

TEST(Metrics, NonNegativeOnRandomPairs) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const auto a = wiggly_path(rng, 50), b = wiggly_path(rng, 50);
    EXPECT_GE(rpe_cm(a, b, 1), 0.0);
    EXPECT_GE(ate_m(a, b), 0.0);
  }
}

TEST(Metrics, Errors) {
  const std::vector<double> lengths{100};
  EXPECT_THROW(kitti_errors(toy_est(), toy_gt(), lengths), EvalError);
  EXPECT_THROW(rpe_cm(toy_est(), toy_gt(), 0), EvalError);
  EXPECT_THROW(rpe_cm(toy_est(), toy_gt(), 3), EvalError);
  EXPECT_THROW(ate_m(std::vector<Pose2d>{Pose2d()}, std::vector<Pose2d>{Pose2d()}), EvalError);
  EXPECT_THROW(ate_m(toy_est(), std::vector<Pose2d>{Pose2d()}), EvalError);
}

TEST(Association, NearestWithinTolerance) {
  Trajectory gt, est;
  for (int i = 0; i < 10; ++i) gt.push_back(i * 0.25, Pose2d(i, 0, 0));
  est.push_back(0.01, Pose2d());
  est.push_back(0.74, Pose2d());
  est.push_back(1.125, Pose2d());  // midway: 0.125 from both
  est.push_back(5.0, Pose2d());
  const PoseAssociation a = associate(est, gt, 0.05);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a.ground_truth[0].x(), 0.0);
  EXPECT_EQ(a.ground_truth[1].x(), 3.0);
  EXPECT_EQ(a.unmatched, 2);
}

TEST(Trajectories, TumRoundTripAndFormat) {
  testutil::TempDir dir;
  Trajectory t;
  t.push_back(0.125, Pose2d(1.23456789, -9.87654321, 3.0));
  t.push_back(0.375, Pose2d(-0.5, 0.25, -2.5));
  write_tum(t, dir / "t.tum");
  EXPECT_EQ(format_tum_line(t.poses[0]).substr(0, 28), "0.125 1.23456789 -9.87654321");
  const Trajectory back = read_tum(dir / "t.tum");
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.poses[i].timestamp_s, t.poses[i].timestamp_s);
    EXPECT_NEAR(back.poses[i].pose.x(), t.poses[i].pose.x(), 1e-8);
    EXPECT_NEAR(back.poses[i].pose.theta(), t.poses[i].pose.theta(), 1e-8);
  }
}

TEST(Trajectories, RejectsBadFiles) {
  testutil::TempDir dir;
  testutil::write_file(dir / "bad.tum", "0 1 2 3\n");
  EXPECT_THROW(read_tum(dir / "bad.tum"), TrajectoryError);
  testutil::write_file(dir / "order.tum", "1 0 0 0 0 0 0 1\n0.5 0 0 0 0 0 0 1\n");
  EXPECT_THROW(read_tum(dir / "order.tum"), TrajectoryError);
  EXPECT_THROW(read_tum(dir / "none.tum"), TrajectoryError);
}

TEST(Trajectories, InterpolationUsesShortestArc) {
  Trajectory t;
  t.push_back(0, Pose2d(0, 0, 3.0));
  t.push_back(1, Pose2d(2, 0, -3.0));
  const Pose2d mid = interpolate_pose(t, 0.5);
  EXPECT_NEAR(mid.x(), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(mid.theta()), std::numbers::pi, 1e-9);
  EXPECT_EQ(interpolate_pose(t, -1).x(), 0.0);
  EXPECT_EQ(interpolate_pose(t, 9).x(), 2.0);
}

TEST(Geometry, AngleNormalizationAndComposition) {
  EXPECT_EQ(normalize_angle(std::numbers::pi), std::numbers::pi);
  EXPECT_EQ(normalize_angle(-std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(normalize_angle(7.0), 7.0 - 2 * std::numbers::pi, 1e-15);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const Pose2d a(Eigen::Vector3d::Random() * 10), b(Eigen::Vector3d::Random() * 10);
    const Pose2d c = a * b;
    EXPECT_GT(c.theta(), -std::numbers::pi);
    EXPECT_LE(c.theta(), std::numbers::pi);
    EXPECT_LT((c.relative_to(a).vector() - b.vector()).norm(), 1e-9);
    EXPECT_LT(((a * a.inverse()).vector()).norm(), 1e-12);
  }
}
