/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include "revmekf/core.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace revmekf;

namespace
{
// Rodrigues formula, written out independently of the library.
Mat3d rodrigues(const Vec3d& v)
{
  const double th = v.norm();
  if (th == 0.0)
    return Mat3d::Identity();
  const Vec3d k = v / th;
  Mat3d K;
  K << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  return Mat3d::Identity() + std::sin(th) * K + (1.0 - std::cos(th)) * K * K;
}

Vec3d random_vector(std::mt19937_64& rng, double max_norm)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec3d d(u(rng), u(rng), u(rng));
  while (d.norm() < 1e-3)
    d = Vec3d(u(rng), u(rng), u(rng));
  return d.normalized() * (max_norm * std::abs(u(rng)));
}
} // namespace

TEST(CoreTest, ExpOfZeroIsIdentity)
{
  const Quaterniond q = quat_exp<double>(Vec3d::Zero());
  EXPECT_EQ(q.w, 1.0);
  EXPECT_EQ(q.x, 0.0);
  EXPECT_EQ(q.y, 0.0);
  EXPECT_EQ(q.z, 0.0);
}

TEST(CoreTest, ExpPiAboutX)
{
  const Quaterniond q = quat_exp<double>(Vec3d(pi<double>(), 0.0, 0.0));
  EXPECT_NEAR(q.w, 0.0, 1e-16);
  EXPECT_NEAR(q.x, 1.0, 1e-16);
}

TEST(CoreTest, LogOfBothSignsGivesSameRotation)
{
  const Quaterniond q = quat_exp<double>(Vec3d(0.3, -0.2, 0.5));
  const Vec3d a = quat_log(q);
  const Vec3d b = quat_log(-q);
  EXPECT_LT((a - b).norm(), 1e-15);
  EXPECT_LE(a.norm(), pi<double>());
}

TEST(CoreTest, LogRejectsNonUnit)
{
  EXPECT_THROW(quat_log(Quaterniond(2.0, 0.0, 0.0, 0.0)), InvalidQuaternion);
}

TEST(CoreTest, ExpLogRoundTrip)
{
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i)
  {
    const Vec3d v = random_vector(rng, pi<double>() - 1e-6);
    EXPECT_LT((quat_log(quat_exp<double>(v)) - v).norm(), 1e-10);
  }
}

TEST(CoreTest, SmallAngleBranchIsContinuous)
{
  for (double th : {1e-12, 1e-9, 0.99e-8, 1.01e-8, 1e-7})
  {
    const Vec3d v(th, -th * 0.5, th * 0.25);
    const Quaterniond q = quat_exp<double>(v);
    EXPECT_NEAR(q.norm(), 1.0, 1e-15);
    EXPECT_LT((quat_log(q) - v).norm(), 1e-20 + 1e-12 * th);
  }
}

TEST(CoreTest, CollinearHomomorphism)
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 1000; ++i)
  {
    const Vec3d axis = random_vector(rng, 1.0).normalized();
    const double s = u(rng), t = u(rng);
    const Quaterniond lhs = quat_exp<double>(Vec3d(axis * s)) * quat_exp<double>(Vec3d(axis * t));
    const Quaterniond rhs = quat_exp<double>(Vec3d(axis * (s + t)));
    EXPECT_LT((lhs.coeffs() - rhs.coeffs()).norm(), 1e-11);
  }
}

TEST(CoreTest, MatrixOfProductIsProductOfMatrices)
{
  std::mt19937_64 rng(13);
  for (int i = 0; i < 500; ++i)
  {
    const Quaterniond a = quat_exp<double>(random_vector(rng, 3.0));
    const Quaterniond b = quat_exp<double>(random_vector(rng, 3.0));
    const Mat3d lhs = to_rotation_matrix(a * b);
    const Mat3d rhs = to_rotation_matrix(a) * to_rotation_matrix(b);
    EXPECT_LT((lhs - rhs).norm(), 1e-13);
  }
}

TEST(CoreTest, RodriguesAgreement)
{
  std::mt19937_64 rng(17);
  for (int i = 0; i < 1000; ++i)
  {
    const Vec3d v = random_vector(rng, pi<double>());
    EXPECT_LT((to_rotation_matrix(quat_exp<double>(v)) - rodrigues(v)).cwiseAbs().maxCoeff(), 1e-12);
    const Vec3d p = random_vector(rng, 5.0);
    EXPECT_LT((rotate_vec(quat_exp<double>(v), p) - rodrigues(v) * p).norm(), 1e-12 * (1.0 + p.norm()));
  }
}

TEST(CoreTest, FromRotationMatrixRoundTrip)
{
  std::mt19937_64 rng(19);
  for (int i = 0; i < 500; ++i)
  {
    const Quaterniond q = quat_exp<double>(random_vector(rng, pi<double>())).canonical();
    const Quaterniond r = from_rotation_matrix<double>(to_rotation_matrix(q));
    EXPECT_GE(r.w, 0.0);
    EXPECT_LT(std::min((r.coeffs() - q.coeffs()).norm(), (r.coeffs() + q.coeffs()).norm()), 1e-12);
  }
}

TEST(CoreTest, RotationBetweenMapsDirections)
{
  std::mt19937_64 rng(23);
  for (int i = 0; i < 500; ++i)
  {
    const Vec3d a = random_vector(rng, 2.0);
    const Vec3d b = random_vector(rng, 2.0);
    const Quaterniond q = rotation_between<double>(a, b);
    EXPECT_LT((rotate_vec(q, a).normalized() - b.normalized()).norm(), 1e-12);
    // Shortest rotation: axis orthogonal to both inputs.
    EXPECT_NEAR(q.vec().dot(a), 0.0, 1e-12 * a.norm());
  }
  EXPECT_THROW(rotation_between<double>(Vec3d(1, 0, 0), Vec3d(-1, 0, 0)), AmbiguousRotation);
  EXPECT_THROW(rotation_between<double>(Vec3d::Zero(), Vec3d(1, 0, 0)), AmbiguousRotation);
}

TEST(CoreTest, GeodesicDistanceIsBiInvariant)
{
  std::mt19937_64 rng(29);
  for (int i = 0; i < 200; ++i)
  {
    const Quaterniond a = quat_exp<double>(random_vector(rng, 3.0));
    const Quaterniond b = quat_exp<double>(random_vector(rng, 3.0));
    const Quaterniond c = quat_exp<double>(random_vector(rng, 3.0));
    const double d = geodesic_distance(a, b);
    EXPECT_NEAR(geodesic_distance(c * a, c * b), d, 1e-12);
    EXPECT_NEAR(geodesic_distance(a * c, b * c), d, 1e-12);
    EXPECT_NEAR(geodesic_distance(a, -b), d, 1e-12);
  }
}

TEST(CoreTest, TriadRecoversOrientation)
{
  std::mt19937_64 rng(31);
  const Vec3d g(0.0, 0.0, 9.81);
  const Vec3d b(0.4, 0.0, -0.9);
  for (int i = 0; i < 200; ++i)
  {
    const Quaterniond q = quat_exp<double>(random_vector(rng, pi<double>()));
    const Vec3d acc = rotate_vec(q.conjugate(), g);
    const Vec3d mag = rotate_vec(q.conjugate(), b);
    EXPECT_LT(geodesic_distance(triad<double>(acc, mag, g, b), q), 1e-10);
  }
  EXPECT_THROW(triad<double>(g, g, g, b), AmbiguousRotation);
}

TEST(CoreTest, SkewIsCrossProduct)
{
  const Vec3d a(1.0, -2.0, 0.5), b(0.3, 0.7, -1.1);
  EXPECT_LT((skew<double>(a) * b - a.cross(b)).norm(), 1e-15);
}
