#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "lovebirds/numkit/checkpoint.hpp"
#include "lovebirds/numkit/grad_check.hpp"
#include "lovebirds/numkit/ops.hpp"
#include "lovebirds/numkit/param_store.hpp"

using namespace lovebirds;

namespace {

Mat<double> mat(Index r, Index c, std::initializer_list<double> v) {
  Mat<double> m(r, c);
  Index i = 0;
  for (double x : v) m.data()[i++] = x;
  return m;
}

Mat<double> random_mat(Index r, Index c, Rng& rng) {
  Mat<double> m(r, c);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

}  // namespace

TEST(Affine, BasisVectorPicksRow) {
  auto y = affine<double>(mat(1, 2, {1, 0}), mat(2, 2, {2, 0, 0, 3}), mat(1, 2, {0, 0}));
  EXPECT_EQ(y, mat(1, 2, {2, 0}));
}

TEST(Affine, ZeroInputPassesBias) {
  Rng rng(1);
  auto y = affine<double>(Mat<double>::Zero(1, 2), random_mat(2, 2, rng), mat(1, 2, {5, 7}));
  EXPECT_EQ(y, mat(1, 2, {5, 7}));
}

TEST(Affine, MatchesTripleLoop) {
  Rng rng(2);
  auto x = random_mat(3, 4, rng), W = random_mat(4, 2, rng), b = random_mat(1, 2, rng);
  auto y = affine<double>(x, W, b);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 2; ++j) {
      double s = b(0, j);
      for (Index k = 0; k < 4; ++k) s += x(i, k) * W(k, j);
      EXPECT_NEAR(y(i, j), s, 1e-12);
    }
}

TEST(Affine, ShapeMismatchThrows) {
  EXPECT_THROW(affine<double>(Mat<double>::Zero(1, 3), Mat<double>::Zero(2, 2), Mat<double>::Zero(1, 2)),
               DimensionError);
  EXPECT_THROW(affine<double>(Mat<double>::Zero(1, 2), Mat<double>::Zero(2, 2), Mat<double>::Zero(1, 3)),
               DimensionError);
}

TEST(Softmax, ZerosAreUniform) {
  auto a = softmax<double>(Vec<double>::Zero(3));
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(a(i), 1.0 / 3, 1e-15);
}

TEST(Softmax, MaskedPositionIsZero) {
  Vec<double> v(3);
  v << 10, 10, -1e9;
  Mask m(3);
  m << true, true, false;
  auto a = masked_softmax<double>(v, m);
  EXPECT_DOUBLE_EQ(a(0), 0.5);
  EXPECT_DOUBLE_EQ(a(1), 0.5);
  EXPECT_EQ(a(2), 0.0);
}

TEST(Softmax, MatchesExtendedPrecision) {
  Vec<double> v(3);
  v << 1, 2, 3;
  auto a = softmax<double>(v);
  long double z = std::exp(1.0L) + std::exp(2.0L) + std::exp(3.0L);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(a(i), static_cast<double>(std::exp(static_cast<long double>(i + 1)) / z), 1e-15);
}

TEST(Softmax, NoValidPositionThrows) {
  EXPECT_THROW(masked_softmax<double>(Vec<double>::Zero(2), Mask::Constant(2, false)), EmptySupportError);
}

TEST(Softmax, LargeLogitsStayFinite) {
  Vec<double> v(2);
  v << 1000, 999;
  auto a = softmax<double>(v);
  EXPECT_TRUE(all_finite(a));
  EXPECT_NEAR(a(0), 1 / (1 + std::exp(-1.0)), 1e-12);
}

TEST(Dropout, RateZeroAndEvalAreIdentity) {
  Rng rng(3);
  auto x = random_mat(4, 5, rng);
  EXPECT_EQ(dropout<double>(x, 0.0, Mode::Train, rng), x);
  EXPECT_EQ(dropout<double>(x, 0.7, Mode::Eval, rng), x);
}

TEST(Dropout, MeanIsPreserved) {
  Rng rng(4);
  Mat<double> x = Mat<double>::Ones(1, 100000);
  auto y = dropout<double>(x, 0.5, Mode::Train, rng);
  // each element is 0 or 2: sd 1, so the mean has sd 1/sqrt(n)
  EXPECT_NEAR(y.mean(), 1.0, 3.0 / std::sqrt(100000.0));
}

TEST(Dropout, RejectsBadRate) {
  Rng rng(5);
  EXPECT_THROW(dropout<double>(Mat<double>::Ones(1, 2), 1.0, Mode::Train, rng), ParameterError);
  EXPECT_THROW(dropout<double>(Mat<double>::Ones(1, 2), -0.1, Mode::Train, rng), ParameterError);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.next_u64(), b.next_u64());
    EXPECT_EQ(a.normal(), b.normal());
    EXPECT_EQ(a.below(17), b.below(17));
  }
}

TEST(Rng, EngineMatchesStandardSequence) {
  // The standard fixes the 10000th output of a default-seeded mt19937_64.
  Rng r(5489);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = r.next_u64();
  EXPECT_EQ(x, 9981545732273789042ULL);
}

TEST(Rng, DeriveSeparatesStreams) {
  EXPECT_EQ(Rng::derive(7, 3), Rng::derive(7, 3));
  EXPECT_NE(Rng::derive(7, 3), Rng::derive(7, 4));
  EXPECT_NE(Rng::derive(7, 3), Rng::derive(8, 3));
}

TEST(Rng, BelowStaysInRange) {
  Rng r(9);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) ++hits[r.below(7)];
  for (int h : hits) EXPECT_NEAR(h, 1000, 150);
}

TEST(Rng, DirichletSumsToOne) {
  Rng r(10);
  for (double alpha : {0.1, 0.3, 1.0, 5.0}) {
    auto d = r.dirichlet(alpha, 8);
    double s = 0;
    for (double x : d) {
      EXPECT_GE(x, 0.0);
      s += x;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(ParamStore, DuplicateNameThrows) {
  ParamStore<double> s;
  s.add("a", Mat<double>::Zero(1, 1));
  EXPECT_THROW(s.add("a", Mat<double>::Zero(1, 1)), ParameterError);
  EXPECT_THROW(s.value("b"), ParameterError);
}

TEST(ParamStore, IterationIsSorted) {
  ParamStore<double> s;
  s.add("zeta", Mat<double>::Zero(1, 1));
  s.add("alpha", Mat<double>::Zero(1, 1));
  s.add("mid", Mat<double>::Zero(1, 1));
  EXPECT_EQ(s.names(), (std::vector<std::string>{"alpha", "mid", "zeta"}));
}

TEST(ParamStore, ClipScalesToMaxNorm) {
  ParamStore<double> s;
  s.add("a", Mat<double>::Zero(1, 2));
  s.grad("a") << 3, 4;
  EXPECT_DOUBLE_EQ(s.clip_grad_norm(1.0), 5.0);
  EXPECT_NEAR(s.grad_norm(), 1.0, 1e-12);
  EXPECT_NEAR(s.peek_grad("a")(0, 0), 0.6, 1e-12);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  ParamStore<double> s;
  s.add("a", mat(1, 2, {1.5, -2}));
  s.grad("a");
  adam_step(s, AdamConfig{});
  EXPECT_EQ(s.value("a"), mat(1, 2, {1.5, -2}));
}

TEST(Adam, FirstStepMovesByLr) {
  ParamStore<double> s;
  s.add("a", mat(1, 1, {0.5}));
  s.grad("a")(0, 0) = 1.0;
  adam_step(s, AdamConfig{});
  EXPECT_NEAR(s.value("a")(0, 0), 0.5 - 1e-3, 1e-9);
}

TEST(Adam, QuadraticDecreasesMonotonically) {
  ParamStore<double> s;
  s.add("a", mat(1, 1, {1.0}));
  AdamConfig cfg;
  cfg.lr = 0.1;
  double prev = 1.0;
  for (int i = 0; i < 5; ++i) {
    s.grad("a")(0, 0) = 2 * s.value("a")(0, 0);
    adam_step(s, cfg);
    const double now = std::abs(s.value("a")(0, 0));
    EXPECT_LT(now, prev);
    prev = now;
  }
}

TEST(Adam, MissingGradientIsAnError) {
  ParamStore<double> s;
  s.add("a", mat(1, 1, {1.0}));
  s.add("b", mat(1, 1, {1.0}));
  s.grad("a")(0, 0) = 1;
  EXPECT_THROW(adam_step(s, AdamConfig{}), IncompleteBackwardError);
}

TEST(Adam, FrozenEntriesDoNotMove) {
  ParamStore<double> s;
  s.add("a", mat(1, 1, {1.0}), false);
  s.add("b", mat(1, 1, {1.0}));
  s.grad("b")(0, 0) = 1;
  adam_step(s, AdamConfig{});
  EXPECT_EQ(s.value("a")(0, 0), 1.0);
  EXPECT_LT(s.value("b")(0, 0), 1.0);
}

TEST(GradCheck, SumOfSquares) {
  ParamStore<double> s;
  Rng rng(11);
  s.add_gaussian("a", 3, 4, 1.0, rng);
  auto loss = [](ParamStore<double>& st, bool g) {
    if (g) st.grad("a") += 2 * st.value("a");
    return st.value("a").squaredNorm();
  };
  EXPECT_LT(grad_check(loss, s).max_rel_error, 1e-8);
}

TEST(GradCheck, ConstantLossUsesFloor) {
  ParamStore<double> s;
  s.add("a", Mat<double>::Ones(2, 2));
  auto loss = [](ParamStore<double>& st, bool g) {
    if (g) st.grad("a");
    return 3.0;
  };
  EXPECT_LT(grad_check(loss, s).max_rel_error, 1e-8);
}

TEST(GradCheck, DetectsWrongGradient) {
  ParamStore<double> s;
  s.add("a", Mat<double>::Ones(1, 3));
  auto loss = [](ParamStore<double>& st, bool g) {
    if (g) st.grad("a") += 3 * st.value("a");
    return st.value("a").squaredNorm();
  };
  auto r = grad_check(loss, s);
  EXPECT_GT(r.max_rel_error, 0.1);
  EXPECT_EQ(r.worst_param, "a");
}

TEST(Checkpoint, RoundTripsBothPrecisions) {
  const auto dir = std::filesystem::temp_directory_path() / "lovebirds_ckpt_test";
  std::filesystem::create_directories(dir);
  Rng rng(12);
  ParamStore<double> d;
  d.add_gaussian("x.w", 3, 2, 1.0, rng);
  d.add_gaussian("x.b", 1, 2, 1.0, rng, false);
  write_checkpoint(dir / "d.ckpt", make_checkpoint(d, {{"note", "t"}}));
  auto back = read_checkpoint(dir / "d.ckpt");
  EXPECT_EQ(back.precision(), 64);
  EXPECT_EQ(back.header.at("note"), "t");
  ParamStore<double> d2;
  d2.add("x.w", Mat<double>::Zero(3, 2));
  d2.add("x.b", Mat<double>::Zero(1, 2), false);
  load_into(back, d2);
  EXPECT_TRUE(d.values_equal(d2));

  ParamStore<float> f;
  f.add("x.w", d.value("x.w").cast<float>());
  write_checkpoint(dir / "f.ckpt", make_checkpoint(f, {}));
  auto fb = read_checkpoint(dir / "f.ckpt");
  EXPECT_EQ(fb.precision(), 32);
  ParamStore<float> f2;
  f2.add("x.w", Mat<float>::Zero(3, 2));
  load_into(fb, f2);
  EXPECT_TRUE(f.values_equal(f2));
}

TEST(Checkpoint, MismatchesAreRejected) {
  const auto dir = std::filesystem::temp_directory_path() / "lovebirds_ckpt_test";
  std::filesystem::create_directories(dir);
  ParamStore<double> d;
  d.add("a", Mat<double>::Zero(2, 2));
  auto ck = make_checkpoint(d, {});
  ParamStore<double> wrong_shape;
  wrong_shape.add("a", Mat<double>::Zero(2, 3));
  EXPECT_THROW(load_into(ck, wrong_shape), CheckpointError);
  ParamStore<double> wrong_name;
  wrong_name.add("b", Mat<double>::Zero(2, 2));
  EXPECT_THROW(load_into(ck, wrong_name), CheckpointError);
  {
    std::ofstream out(dir / "junk.ckpt", std::ios::binary);
    out << "not a checkpoint";
  }
  EXPECT_THROW(read_checkpoint(dir / "junk.ckpt"), CheckpointError);
}
