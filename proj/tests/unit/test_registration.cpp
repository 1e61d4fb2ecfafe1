#include "rodo/registration.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace rodo;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

SurfacePoint surface_point(Eigen::Vector2d mean, Eigen::Vector2d normal, int count = 4, double planarity = 2.0) {
  SurfacePoint p;
  p.mean = mean;
  p.normal = normal.normalized();
  p.point_count = count;
  p.planarity = planarity;
  return p;
}

SurfacePointSet random_scan(std::mt19937_64& rng, int n, double extent) {
  std::uniform_real_distribution<double> u(0, 1);
  SurfacePointSet s;
  s.grid_resolution_m = 3.5;
  for (int i = 0; i < n; ++i) {
    const double phi = 2 * std::numbers::pi * u(rng);
    s.points.push_back(surface_point(oracle::random_point(rng, extent), {std::cos(phi), std::sin(phi)},
                                     1 + static_cast<int>(10 * u(rng)), 4 * u(rng)));
  }
  return s;
}

Pose2d random_pose(std::mt19937_64& rng, double shift, double angle) {
  std::uniform_real_distribution<double> u(-1, 1);
  const double x = shift * u(rng);
  const double y = shift * u(rng);
  return {x, y, angle * u(rng)};
}

RegistrationConfig scene_config(double max_shift, double max_angle, double extent) {
  RegistrationConfig cfg;
  cfg.correspondence_radius_m = oracle::scene_displacement_bound({extent * std::sqrt(2.0), 0}, max_shift, max_angle) + 0.1;
  cfg.max_iterations = 100;
  cfg.convergence_tol = 1e-12;
  cfg.min_correspondences = 4;
  return cfg;
}

}  // namespace

TEST(Huber, Examples) {
  const double d = 0.1;
  EXPECT_EQ(huber_loss(0.0, d), 0.0);
  EXPECT_DOUBLE_EQ(huber_loss(d * d, d), d * d);
  EXPECT_DOUBLE_EQ(2 * d * std::sqrt(d * d) - d * d, d * d);
  EXPECT_NEAR(huber_loss(4 * d * d, d), 3 * d * d, 1e-15);
}

TEST(Huber, MonotoneAndBelowQuadratic) {
  double prev = 0;
  for (int i = 0; i < 10000; ++i) {
    const double s = i * 1e-4;
    const double l = huber_loss(s, 0.1);
    EXPECT_GE(l, prev);
    if (s > 0.01) EXPECT_LE(l, s);
    prev = l;
  }
}

TEST(Huber, DerivativeMatchesFiniteDifference) {
  for (double s : {0.001, 0.005, 0.02, 0.5, 3.0}) {
    const double h = 1e-7;
    const double fd = (huber_loss(s + h, 0.1) - huber_loss(s - h, 0.1)) / (2 * h);
    EXPECT_NEAR(huber_derivative(s, 0.1), fd, 1e-6);
  }
}

TEST(ResidualWeight, Examples) {
  const SurfacePoint a = surface_point({0, 0}, {1, 0}, 1, 2.0);
  EXPECT_DOUBLE_EQ(residual_weight(a, a), 3.0);
  const SurfacePoint b = surface_point({0, 0}, {1, 0}, 3, 2.0);
  EXPECT_DOUBLE_EQ(residual_weight(a, b), 2.5);
  const SurfacePoint c = surface_point({0, 0}, {-1, 0}, 1, 2.0);
  EXPECT_DOUBLE_EQ(residual_weight(a, c), 2.0);
  EXPECT_DOUBLE_EQ(similarity(0.0, 0.0), 1.0);
}

TEST(Correspondences, SelfMatchAllWeightsThree) {
  std::mt19937_64 rng(1);
  const SurfacePointSet scan = random_scan(rng, 50, 20);
  const Pose2d kf_pose(3, -1, 0.4);
  const std::vector<RegistrationTarget> kfs{RegistrationTarget(scan, kf_pose)};
  const auto corr = find_correspondences(scan, kfs, kf_pose, 3.5);
  ASSERT_EQ(corr.size(), scan.size());
  for (const Correspondence& c : corr) {
    EXPECT_EQ(c.source_index, c.target_index);
    EXPECT_NEAR(c.weight, 3.0, 1e-12);
  }
}

TEST(Correspondences, FarKeyframeGivesNothing) {
  std::mt19937_64 rng(2);
  const SurfacePointSet scan = random_scan(rng, 30, 10);
  const std::vector<RegistrationTarget> kfs{RegistrationTarget(scan, Pose2d(100, 0, 0))};
  EXPECT_TRUE(find_correspondences(scan, kfs, Pose2d(), 3.5).empty());
}

TEST(Correspondences, MatchExhaustiveSearch) {
  std::mt19937_64 rng(3);
  const SurfacePointSet scan = random_scan(rng, 120, 30);
  const SurfacePointSet other = random_scan(rng, 150, 30);
  const std::vector<RegistrationTarget> kfs{RegistrationTarget(other, Pose2d(0.5, 0.2, 0.1)),
                                            RegistrationTarget(scan, Pose2d(-1, 1, -0.2))};
  const Pose2d guess(0.3, -0.4, 0.05);
  const auto corr = find_correspondences(scan, kfs, guess, 3.5);
  std::size_t at = 0;
  for (std::size_t k = 0; k < kfs.size(); ++k) {
    const auto& targets = kfs[k].points().points;
    for (std::size_t i = 0; i < scan.size(); ++i) {
      const Eigen::Vector2d q = guess * scan.points[i].mean;
      const Eigen::Vector2d n = guess.rotation() * scan.points[i].normal;
      int best = -1;
      double best_d = 3.5 * 3.5;
      for (std::size_t j = 0; j < targets.size(); ++j) {
        const double d = (targets[j].mean - q).squaredNorm();
        if (d <= best_d && n.dot(targets[j].normal) > 0 && (best < 0 || d < best_d)) {
          best = static_cast<int>(j);
          best_d = d;
        }
      }
      if (best < 0) continue;
      ASSERT_LT(at, corr.size());
      EXPECT_EQ(corr[at].keyframe_index, static_cast<int>(k));
      EXPECT_EQ(corr[at].source_index, static_cast<int>(i));
      EXPECT_EQ(corr[at].target_index, best);
      ++at;
    }
  }
  EXPECT_EQ(at, corr.size());
}

TEST(RegistrationCost, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const SurfacePointSet scan = random_scan(rng, 60, 15);
    const std::vector<RegistrationTarget> kfs{RegistrationTarget(scan, random_pose(rng, 1.0, 0.1)),
                                              RegistrationTarget(random_scan(rng, 60, 15), Pose2d())};
    const Pose2d pose = random_pose(rng, 1.0, 0.1);
    const auto corr = find_correspondences(scan, kfs, pose, 3.5);
    ASSERT_FALSE(corr.empty());
    Eigen::Vector3d grad;
    registration_cost(scan, kfs, corr, pose, 0.1, &grad);
    const Eigen::Vector3d fd = oracle::central_difference(
        [&](const Eigen::Vector3d& x) { return registration_cost(scan, kfs, corr, Pose2d(x), 0.1); }, pose.vector());
    EXPECT_LT((grad - fd).norm() / std::max(fd.norm(), 1e-9), 1e-4) << trial;
  }
}

TEST(RegistrationCost, InvariantUnderGlobalRigidTransform) {
  std::mt19937_64 rng(5);
  const SurfacePointSet scan = random_scan(rng, 80, 20);
  const Pose2d kf_pose = random_pose(rng, 2, 0.2);
  const Pose2d pose = random_pose(rng, 1, 0.1);
  const std::vector<RegistrationTarget> kfs{RegistrationTarget(random_scan(rng, 80, 20), kf_pose)};
  const auto corr = find_correspondences(scan, kfs, pose, 3.5);
  const double c0 = registration_cost(scan, kfs, corr, pose, 0.1);
  const Pose2d g(10, -4, 1.2);
  const std::vector<RegistrationTarget> moved{RegistrationTarget(kfs[0].points().transformed(kf_pose.inverse()), g * kf_pose)};
  EXPECT_NEAR(registration_cost(scan, moved, corr, g * pose, 0.1), c0, 1e-9);
}

TEST(Register, SelfRegistrationAtTruthStays) {
  std::mt19937_64 rng(6);
  const SurfacePointSet scan = random_scan(rng, 80, 20);
  const Pose2d truth(1, 2, 0.3);
  const std::vector<RegistrationTarget> kfs{RegistrationTarget(scan, truth)};
  const RegistrationResult r = register_scan(scan, kfs, truth, {});
  EXPECT_LT((r.pose.vector() - truth.vector()).norm(), 1e-12);
  EXPECT_LE(r.final_cost, 1e-12);
  EXPECT_LE(r.iterations, 2);
  EXPECT_EQ(r.correspondence_count, 80);
}

TEST(Register, RecoversUnitShift) {
  std::mt19937_64 rng(7);
  const SurfacePointSet scan = oracle::friendly_scene(rng, 25, 1.0, 0.0);
  const std::vector<RegistrationTarget> kfs{RegistrationTarget(scan, Pose2d(1.0, 0.0, 0.0))};
  const RegistrationResult r = register_scan(scan, kfs, Pose2d(), scene_config(1.0, 0.0, 25));
  EXPECT_LT((r.pose.vector() - Eigen::Vector3d(1, 0, 0)).norm(), 1e-6);
}

TEST(Register, RecoversRandomTransformsInFriendlyScene) {
  std::mt19937_64 rng(8);
  const SurfacePointSet scan = oracle::friendly_scene(rng, 25, 2.0, 10 * kDeg);
  ASSERT_GE(scan.size(), 6u);
  const RegistrationConfig cfg = scene_config(2.0, 10 * kDeg, 25);
  for (int trial = 0; trial < 100; ++trial) {
    const Pose2d truth = random_pose(rng, 2.0, 10 * kDeg);
    const std::vector<RegistrationTarget> kfs{RegistrationTarget(scan, truth)};
    const RegistrationResult r = register_scan(scan, kfs, Pose2d(), cfg);
    ASSERT_LT((r.pose.translation() - truth.translation()).norm(), 1e-4) << trial;
    ASSERT_LT(std::abs(normalize_angle(r.pose.theta() - truth.theta())), 1e-5) << trial;
  }
}

TEST(Register, TruthIsLocalMinimum) {
  std::mt19937_64 rng(9);
  const SurfacePointSet scan = random_scan(rng, 100, 25);
  const Pose2d truth(0.4, -0.3, 0.05);
  const std::vector<RegistrationTarget> kfs{RegistrationTarget(scan, truth)};
  const auto corr = find_correspondences(scan, kfs, truth, 3.5);
  const double at_truth = registration_cost(scan, kfs, corr, truth, 0.1);
  for (int i = 0; i < 100; ++i) {
    const Pose2d p = truth * random_pose(rng, 0.5, 5 * kDeg);
    EXPECT_LE(at_truth, registration_cost(scan, kfs, find_correspondences(scan, kfs, p, 3.5), p, 0.1));
  }
}

TEST(Register, DeterministicAndDegenerate) {
  std::mt19937_64 rng(10);
  const SurfacePointSet scan = random_scan(rng, 60, 20);
  const std::vector<RegistrationTarget> kfs{RegistrationTarget(random_scan(rng, 60, 20), Pose2d(0.2, 0.1, 0.02))};
  const RegistrationResult a = register_scan(scan, kfs, Pose2d(), {});
  const RegistrationResult b = register_scan(scan, kfs, Pose2d(), {});
  EXPECT_EQ(a.pose, b.pose);
  EXPECT_EQ(a.final_cost, b.final_cost);
  EXPECT_THROW(register_scan(SurfacePointSet{}, kfs, Pose2d(), {}), DegenerateRegistration);
  const std::vector<RegistrationTarget> far{RegistrationTarget(scan, Pose2d(500, 0, 0))};
  EXPECT_THROW(register_scan(scan, far, Pose2d(), {}), DegenerateRegistration);
}

TEST(FitRigid, RecoversExactTransform) {
  std::mt19937_64 rng(12);
  std::vector<Eigen::Vector2d> src, dst;
  const Pose2d t(-3, 5, 2.5);
  for (int i = 0; i < 20; ++i) {
    src.push_back(oracle::random_point(rng, 10));
    dst.push_back(t * src.back());
  }
  const Pose2d fit = fit_rigid_transform<double>(src, dst);
  EXPECT_LT((fit.vector() - t.vector()).norm(), 1e-12);
}

namespace {

std::vector<Eigen::Vector2d> lattice_cloud(std::mt19937_64& rng, int n) {
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i < n; ++i) pts.push_back(oracle::random_point(rng, 15));
  return pts;
}

}  // namespace

TEST(Icp, IdenticalClouds) {
  std::mt19937_64 rng(13);
  const auto pts = lattice_cloud(rng, 50);
  const IcpResult r = icp_refine(pts, pts, Pose2d(), {});
  EXPECT_EQ(r.fitness, 0.0);
  EXPECT_TRUE(r.accepted);
  EXPECT_EQ(r.pose, Pose2d());
}

TEST(Icp, RecoversShift) {
  std::vector<Eigen::Vector2d> cur, prev;
  for (int i = -5; i <= 5; ++i)
    for (int j = -5; j <= 5; ++j) {
      cur.emplace_back(3.0 * i + 0.1 * j * j, 3.0 * j + 0.05 * i * i);
      prev.push_back(cur.back() + Eigen::Vector2d(0.3, -0.2));
    }
  const IcpResult r = icp_refine(cur, prev, Pose2d(), {});
  EXPECT_TRUE(r.accepted);
  EXPECT_LT((r.pose.vector() - Eigen::Vector3d(0.3, -0.2, 0)).norm(), 1e-6);
}

TEST(Icp, RejectedFitKeepsInitialBitExactly) {
  // Checkerboard jitter of 1.2 m per axis: no rigid motion reduces the mean squared distance below 2.88.
  std::vector<Eigen::Vector2d> cur, prev;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      cur.emplace_back(8.0 * i, 8.0 * j);
      prev.push_back(cur.back() + 1.2 * Eigen::Vector2d(i % 2 ? 1 : -1, j % 2 ? 1 : -1));
    }
  const Pose2d initial(1e-9, -2e-9, 1e-10);
  IcpConfig cfg;
  cfg.max_corr_dist = 3.0;
  const IcpResult r = icp_refine(cur, prev, initial, cfg);
  EXPECT_NEAR(r.fitness, 2.88, 1e-6);
  EXPECT_FALSE(r.accepted);
  EXPECT_EQ(r.pose, initial);
}

TEST(Icp, GateNeverMovesPoseWhenRejected) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const auto cur = lattice_cloud(rng, 30);
    const auto prev = lattice_cloud(rng, 30);
    const Pose2d initial = random_pose(rng, 1, 0.1);
    IcpConfig cfg;
    cfg.fitness_threshold = 0.5;
    const IcpResult r = icp_refine(cur, prev, initial, cfg);
    if (!r.accepted) EXPECT_EQ(r.pose, initial);
    if (r.fitness >= cfg.fitness_threshold) EXPECT_FALSE(r.accepted);
  }
}
