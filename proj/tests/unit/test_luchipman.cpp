#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "muellerkit/luchipman.hpp"
#include "muellerkit/synth.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace muellerkit;
using testing_support::random_matrix;
using testing_support::random_physical;

namespace {

constexpr double kPi = std::numbers::pi;

const CompositionParams kComposed{{0.7, 0.6, 0.5}, kPi / 8, 1.0, {0.3, 0.1, 0.0}};

bool all_finite(const LuChipmanPixel& px) {
  return std::isfinite(px.diattenuation) && std::isfinite(px.retardance) && std::isfinite(px.depolarization) &&
         px.m_diattenuator.all_finite() && px.m_retarder.all_finite() && px.m_depolarizer.all_finite();
}

}  // namespace

TEST(Diattenuation, Examples) {
  const auto a = diattenuation(MuellerMatrix::identity());
  EXPECT_EQ(a.magnitude, 0.0);
  EXPECT_EQ(a.vec, (Vec3{0, 0, 0}));

  const auto b = diattenuation(make_diattenuator({0.6, 0, 0}));
  EXPECT_DOUBLE_EQ(b.magnitude, 0.6);
  EXPECT_EQ(b.vec, (Vec3{0.6, 0, 0}));
  EXPECT_FALSE(b.clamped);

  MuellerMatrix m = MuellerMatrix::identity();
  m(0, 1) = 0.6;
  m(0, 2) = 0.8;
  const auto c = diattenuation(m);
  EXPECT_NEAR(c.magnitude, 1.0, 1e-15);
  EXPECT_LE(c.magnitude, 1.0);

  m(0, 2) = 0.9;
  const auto d = diattenuation(m);
  EXPECT_EQ(d.magnitude, 1.0);
  EXPECT_TRUE(d.clamped);
  EXPECT_NEAR(norm(d.vec), 1.0, 1e-15);
}

TEST(Polarizance, Examples) {
  EXPECT_EQ(polarizance(MuellerMatrix::identity()).magnitude, 0.0);
  const auto p = polarizance(make_diattenuator({0.6, 0, 0}).transposed());
  EXPECT_DOUBLE_EQ(p.magnitude, 0.6);
  EXPECT_EQ(p.vec, (Vec3{0.6, 0, 0}));
  EXPECT_EQ(polarizance(MuellerMatrix::diagonal({1, 0.3, -0.2, 0.9})).magnitude, 0.0);
}

TEST(DecomposePixel, Identity) {
  const auto px = decompose_pixel(MuellerMatrix::identity());
  EXPECT_EQ(px.status, PixelStatus::Ok);
  EXPECT_EQ(px.diattenuation, 0.0);
  EXPECT_EQ(px.retardance, 0.0);
  EXPECT_EQ(px.depolarization, 0.0);
  EXPECT_EQ(reconstruct(px), MuellerMatrix::identity());
}

TEST(DecomposePixel, DiagonalDepolarizer) {
  const auto px = decompose_pixel(MuellerMatrix::diagonal({1, 0.6, 0.5, 0.4}));
  EXPECT_EQ(px.status, PixelStatus::Ok);
  EXPECT_NEAR(px.depolarization, 0.5, 1e-12);
  EXPECT_EQ(px.diattenuation, 0.0);
  EXPECT_NEAR(px.retardance, 0.0, 1e-12);
}

TEST(DecomposePixel, QuarterWavePlate) {
  const auto px = decompose_pixel(make_linear_retarder(0, kPi / 2));
  EXPECT_EQ(px.status, PixelStatus::Ok);
  EXPECT_NEAR(px.retardance, kPi / 2, 1e-12);
  EXPECT_EQ(px.diattenuation, 0.0);
  EXPECT_NEAR(px.depolarization, 0.0, 1e-12);
}

TEST(DecomposePixel, ComposedExample) {
  const auto px = decompose_pixel(kComposed.matrix());
  EXPECT_EQ(px.status, PixelStatus::Ok);
  EXPECT_NEAR(px.depolarization, 0.4, 1e-8);
  EXPECT_NEAR(px.retardance, 1.0, 1e-8);
  EXPECT_NEAR(px.diattenuation, std::sqrt(0.1), 1e-8);
  EXPECT_LT(max_abs_diff(reconstruct(px), kComposed.matrix()), 1e-8);
}

TEST(DecomposePixel, MatchesClosedFormReference) {
  Xoshiro256 rng(21);
  for (int n = 0; n < 300; ++n) {
    const auto m = random_physical(rng);
    const auto px = decompose_pixel(m);
    const auto ref = oracle::lu_chipman(m);
    EXPECT_NEAR(px.diattenuation, ref.diattenuation, 1e-12);
    EXPECT_NEAR(px.retardance, ref.retardance, 1e-9);
    EXPECT_NEAR(px.depolarization, ref.depolarization, 1e-12);
    const Eigen::Matrix3d closed = oracle::closed_form_m_delta(
        oracle::to_eigen(lower_right(m * (oracle::from_eigen(oracle::to_eigen(px.m_diattenuator).inverse())))));
    EXPECT_LT((oracle::to_eigen(lower_right(px.m_depolarizer)) - closed).cwiseAbs().maxCoeff(), 1e-11);
  }
}

TEST(DecomposePixel, RandomCompositionRoundTrip) {
  Xoshiro256 rng(22);
  for (int n = 0; n < 1000; ++n) {
    const auto p = random_composition(rng);
    const auto m = p.matrix();
    const auto px = decompose_pixel(m);
    ASSERT_EQ(px.status, PixelStatus::Ok);
    EXPECT_NEAR(px.depolarization, p.expected_depolarization(), 1e-8);
    EXPECT_NEAR(px.retardance, p.retardance, 1e-8);
    EXPECT_NEAR(px.diattenuation, p.expected_diattenuation(), 1e-8);
    EXPECT_LT(max_abs_diff(reconstruct(px), m), 1e-8);
  }
}

TEST(DecomposePixel, ScaleInvariance) {
  Xoshiro256 rng(23);
  for (int n = 0; n < 200; ++n) {
    const auto m = random_physical(rng);
    const auto base = decompose_pixel(m);
    for (double c : {0.25, 2.0, 1024.0}) {
      const auto s = decompose_pixel(c * m);
      EXPECT_EQ(s.diattenuation, base.diattenuation);
      EXPECT_EQ(s.retardance, base.retardance);
      EXPECT_EQ(s.depolarization, base.depolarization);
    }
    for (double c : {3.0, 0.1, 7.77e5}) {
      const auto s = decompose_pixel(c * m);
      EXPECT_NEAR(s.diattenuation, base.diattenuation, 1e-12);
      EXPECT_NEAR(s.retardance, base.retardance, 1e-12);
      EXPECT_NEAR(s.depolarization, base.depolarization, 1e-12);
    }
  }
}

TEST(DecomposePixel, FrameRotationInvariance) {
  Xoshiro256 rng(24);
  for (int n = 0; n < 100; ++n) {
    const auto m = random_physical(rng);
    const double th = rng.uniform(-kPi, kPi);
    const auto a = decompose_pixel(m);
    const auto b = decompose_pixel(make_rotator(th) * m * make_rotator(-th));
    EXPECT_NEAR(a.diattenuation, b.diattenuation, 1e-10);
    EXPECT_NEAR(a.retardance, b.retardance, 1e-10);
    EXPECT_NEAR(a.depolarization, b.depolarization, 1e-10);
  }
}

TEST(DecomposePixel, OutputRanges) {
  Xoshiro256 rng(25);
  for (int n = 0; n < 2000; ++n) {
    const auto m = random_matrix(rng);
    if (!(m(0, 0) > kZeroIntensity)) continue;
    const auto px = decompose_pixel(m);
    EXPECT_TRUE(all_finite(px));
    EXPECT_GE(px.diattenuation, 0.0);
    EXPECT_LE(px.diattenuation, 1.0);
    EXPECT_GE(px.retardance, 0.0);
    EXPECT_LE(px.retardance, kPi);
    EXPECT_GE(px.depolarization, 0.0);
    EXPECT_LE(px.depolarization, 1.0);
  }
}

TEST(DecomposePixel, IdealPolarizer) {
  const auto px = decompose_pixel(make_diattenuator({1, 0, 0}));
  EXPECT_EQ(px.status, PixelStatus::DegenerateDiattenuator);
  EXPECT_TRUE(all_finite(px));
  EXPECT_DOUBLE_EQ(px.diattenuation, 1.0);
  EXPECT_EQ(px.retardance, 0.0);
  EXPECT_EQ(px.depolarization, 0.0);
  try {
    reconstruct(px);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateNoReconstruction);
  }
}

TEST(DecomposePixel, SingularDepolarizer) {
  const auto px = decompose_pixel(MuellerMatrix::diagonal({1, 0, 0, 0}));
  EXPECT_EQ(px.status, PixelStatus::SingularDepolarizer);
  EXPECT_TRUE(all_finite(px));
  EXPECT_EQ(px.retardance, 0.0);
  EXPECT_NEAR(px.depolarization, 1.0, 1e-15);

  // Rank-2 lower block: a partial polarizer along one axis only.
  const auto px2 = decompose_pixel(MuellerMatrix::diagonal({1, 0.5, 0.5, 0}));
  EXPECT_EQ(px2.status, PixelStatus::SingularDepolarizer);
  EXPECT_TRUE(all_finite(px2));
  EXPECT_THROW(reconstruct(px2), Error);
}

TEST(DecomposePixel, NoProjectFlagsUnphysical) {
  DecomposeOptions opts;
  opts.project_unphysical = false;
  const auto px = decompose_pixel(MuellerMatrix::diagonal({1, 0.9, 0.9, -0.9}), opts);
  EXPECT_EQ(px.status, PixelStatus::UnphysicalInput);
  EXPECT_FALSE(px.projected);
  EXPECT_TRUE(all_finite(px));

  const auto projected = decompose_pixel(MuellerMatrix::diagonal({1, 0.9, 0.9, -0.9}));
  EXPECT_TRUE(projected.projected);
  EXPECT_EQ(projected.status, PixelStatus::Ok);
}

TEST(DecomposePixel, RejectsBadInput) {
  MuellerMatrix m = MuellerMatrix::identity();
  m(0, 0) = 0.0;
  EXPECT_THROW(decompose_pixel(m), Error);
  m(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(decompose_pixel(m), Error);
}

TEST(DecomposeOptions, EpsilonsMustBePositive) {
  DecomposeOptions o;
  o.det_eps = 0.0;
  EXPECT_THROW(o.check(), Error);
  MuellerCube c(1, 1, {500});
  EXPECT_THROW(decompose_cube(c, o), Error);
}

TEST(DecomposeCube, IdentityCube) {
  const auto maps = decompose_cube(MuellerCube(2, 2, {500}));
  ASSERT_EQ(maps.bands.size(), 1u);
  for (std::size_t p = 0; p < 4; ++p) {
    EXPECT_EQ(maps.bands[0].depolarization[p], 0.0);
    EXPECT_EQ(maps.bands[0].retardance[p], 0.0);
    EXPECT_EQ(maps.bands[0].diattenuation[p], 0.0);
    EXPECT_EQ(maps.bands[0].status[p], PixelStatus::Ok);
  }
}

TEST(DecomposeCube, ComposedTile) {
  const auto maps = decompose_cube(MuellerCube(3, 4, {450, 600}, 5.0 * kComposed.matrix()));
  for (const auto& band : maps.bands)
    for (std::size_t p = 0; p < 12; ++p) {
      EXPECT_NEAR(band.depolarization[p], 0.4, 1e-8);
      EXPECT_NEAR(band.retardance[p], 1.0, 1e-8);
      EXPECT_NEAR(band.diattenuation[p], std::sqrt(0.1), 1e-8);
      EXPECT_EQ(band.depolarization[p], band.depolarization[0]);
    }
}

TEST(DecomposeCube, ZeroIntensityPixelIsolated) {
  MuellerCube c(2, 2, {500}, kComposed.matrix());
  c.data[2](0, 0) = 0.0;
  const auto maps = decompose_cube(c);
  EXPECT_EQ(maps.bands[0].status[2], PixelStatus::UnphysicalInput);
  EXPECT_EQ(maps.bands[0].depolarization[2], 0.0);
  for (std::size_t p : {0u, 1u, 3u}) {
    EXPECT_EQ(maps.bands[0].status[p], PixelStatus::Ok);
    EXPECT_NEAR(maps.bands[0].depolarization[p], 0.4, 1e-8);
  }
}

TEST(DecomposeCube, WavelengthSelection) {
  MuellerCube c(1, 2, {450, 550, 650});
  c.data[c.index(2, 0, 1)] = MuellerMatrix::diagonal({1, 0.6, 0.5, 0.4});
  DecomposeOptions o;
  o.wavelengths = {2};
  const auto maps = decompose_cube(c, o);
  ASSERT_EQ(maps.bands.size(), 1u);
  EXPECT_EQ(maps.bands[0].wavelength_nm, 650.0);
  EXPECT_NEAR(maps.bands[0].depolarization[1], 0.5, 1e-12);
  o.wavelengths = {3};
  EXPECT_THROW(decompose_cube(c, o), Error);
}

TEST(DecomposeCube, MaskedRejected) {
  MuellerCube c(1, 1, {500});
  c.mask = ElementMask::upper_left_3x3();
  try {
    decompose_cube(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MaskedInput);
  }
  c.mask = ElementMask::full();
  EXPECT_NO_THROW(decompose_cube(c));
}

TEST(DecomposeCube, MalformedRejected) {
  MuellerCube c(2, 2, {500});
  c.data.resize(3);
  try {
    decompose_cube(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(DecomposeCube, DeterministicAcrossWorkers) {
  Xoshiro256 rng(26);
  MuellerCube c(9, 11, {450, 650});
  for (auto& m : c.data) m = rng.uniform01() < 0.5 ? random_physical(rng) : random_matrix(rng);
  DecomposeOptions o;
  const auto a = decompose_cube(c, o);
  for (std::size_t w : {2u, 5u, 16u}) {
    o.workers = w;
    const auto b = decompose_cube(c, o);
    for (std::size_t s = 0; s < a.bands.size(); ++s) {
      EXPECT_EQ(a.bands[s].depolarization, b.bands[s].depolarization);
      EXPECT_EQ(a.bands[s].retardance, b.bands[s].retardance);
      EXPECT_EQ(a.bands[s].diattenuation, b.bands[s].diattenuation);
      EXPECT_EQ(a.bands[s].status, b.bands[s].status);
    }
  }
}
