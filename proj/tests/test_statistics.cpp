#include <gtest/gtest.h>

#include <cmath>

#include "tribeam/photonics/analysis.hpp"
#include "tribeam/photonics/bootstrap.hpp"
#include "tribeam/photonics/sampling.hpp"

using namespace tribeam;
using namespace tribeam::photonics;

namespace {

MultimodeModel integer_model(double noise) {
  MultimodeModel m;
  m.modes = 7.0;
  m.noise_mean = noise;
  return m;
}

AnalysisOptions options_for(const MultimodeModel& m) {
  AnalysisOptions opt;
  opt.modes = m.modes;
  return opt;
}

}  // namespace

TEST(Bootstrap, ResamplePreservesTotal) {
  const PhotocountHistogram h = sample_photons(integer_model(1.0), 5000, 1);
  std::mt19937_64 rng(3);
  const PhotocountHistogram r = resample(h, rng);
  EXPECT_EQ(r.total(), h.total());
  EXPECT_FALSE(r == h);
}

TEST(Bootstrap, MeanErrorMatchesAnalyticError) {
  const PhotocountHistogram h = sample_photons(integer_model(1.0), 20000, 2);
  auto mean = [](const PhotocountHistogram& x) {
    double s = 0.0;
    for (const auto& [c, n] : x.counts) s += double(c[0]) * n;
    return std::vector<double>{s / x.total()};
  };
  double s = 0.0, s2 = 0.0;
  const double n = static_cast<double>(h.total());
  for (const auto& [c, f] : h.counts) {
    s += double(c[0]) * f;
    s2 += double(c[0]) * c[0] * f;
  }
  const double analytic = std::sqrt((s2 / n - (s / n) * (s / n)) / n);
  const BootstrapResult b = bootstrap(h, mean, 400, 5);
  EXPECT_EQ(b.resamples, 400);
  EXPECT_NEAR(b.std_error[0] / analytic, 1.0, 0.15);
  EXPECT_DOUBLE_EQ(b.estimate[0], s / n);

  const BootstrapResult again = bootstrap(h, mean, 400, 5);
  EXPECT_EQ(again.std_error, b.std_error);
}

TEST(Bootstrap, CountsFailures) {
  const PhotocountHistogram h = sample_photons(integer_model(0.5), 1000, 4);
  int calls = 0;
  const BootstrapResult b = bootstrap(
      h,
      [&](const PhotocountHistogram&) {
        if (calls++ % 2 == 1) throw NumericalError("every other resample fails");
        return std::vector<double>{1.0};
      },
      11, 1);
  EXPECT_GT(b.failures, 0);
  EXPECT_EQ(b.resamples + b.failures, 11);
  EXPECT_THROW(bootstrap(PhotocountHistogram{}, [](const PhotocountHistogram&) { return std::vector<double>{}; }),
               DataError);
}

TEST(Analysis, MarginalPurityWithinErrors) {
  const MultimodeModel m = integer_model(1.0);
  const PhotocountHistogram h = simulate_counts(m, default_detectors(true), 300000, 21);
  AnalysisOptions opt = options_for(m);
  opt.orders = {2};
  const AnalysisResult r = analyze(h, opt);
  const double truth = mu1_from_moments(symmetrize(model_mode_moments(m)));
  ASSERT_TRUE(r.mu1.error.has_value());
  EXPECT_GT(*r.mu1.error, 0.0);
  EXPECT_LT(std::abs(r.mu1.value - truth), 4.0 * *r.mu1.error) << r.mu1.value << " vs " << truth;
  EXPECT_EQ(r.realizations, 300000u);
  ASSERT_TRUE(r.per_mode.std_errors.has_value());
  EXPECT_GT(r.per_mode.std_errors->at({1, 1, 0}), 0.0);
  EXPECT_EQ(r.per_mode.scope, Scope::PerMode);

  // beam-level statistics agree with the model within their errors
  const MomentTable exact = model_beam_moments(m);
  EXPECT_LT(std::abs(r.fano1.value - fano(exact, 0)), 4.0 * *r.fano1.error);
  EXPECT_LT(std::abs(r.r12.value - noise_reduction(exact, 0, 1)), 4.0 * *r.r12.error);
}

TEST(Analysis, UsabilityAtTenThousandRealizations) {
  const MultimodeModel m = integer_model(0.0);
  const PhotocountHistogram h = simulate_counts(m, default_detectors(true), 10000, 22);
  const AnalysisResult r = analyze(h, options_for(m));
  ASSERT_EQ(r.orders.size(), 3u);
  EXPECT_TRUE(r.orders[0].usable) << r.orders[0].relative_error;
  EXPECT_FALSE(r.orders[1].usable) << r.orders[1].relative_error;
  EXPECT_FALSE(r.orders[2].usable) << r.orders[2].relative_error;
  EXPECT_LT(r.orders[0].relative_error, r.orders[1].relative_error);
  EXPECT_LT(r.orders[1].relative_error, r.orders[2].relative_error);
  ASSERT_TRUE(r.orders[0].estimate.has_value());
}

TEST(Analysis, ThresholdControlsUsability) {
  const MultimodeModel m = integer_model(0.0);
  const PhotocountHistogram h = simulate_counts(m, default_detectors(true), 10000, 22);
  AnalysisOptions opt = options_for(m);
  opt.usability.max_relative_error = 10.0;
  const AnalysisResult r = analyze(h, opt);
  for (const auto& o : r.orders) EXPECT_TRUE(o.usable) << o.order;
}

TEST(Analysis, EmAndMomentRoutesAgreeForIdealDetectors) {
  const MultimodeModel m = integer_model(0.5);
  const PhotocountHistogram h = sample_photons(m, 2000, 23);
  AnalysisOptions opt = options_for(m);
  opt.detectors = ideal_detectors();
  opt.orders = {2};
  opt.resamples = 20;
  const AnalysisResult a = analyze(h, opt);
  opt.reconstruction = Reconstruction::Em;
  const AnalysisResult b = analyze(h, opt);
  for (const auto& [k, v] : a.beam.entries) EXPECT_NEAR(b.beam.at(k), v, 1e-6 * std::max(1.0, std::abs(v)));
}

TEST(Analysis, EmptyHistogramIsDataError) {
  EXPECT_THROW(analyze(PhotocountHistogram{}), DataError);
}

TEST(Analysis, CharacteristicMoments) {
  EXPECT_EQ(UsabilityRule::characteristic(2), (Index3{1, 1, 0}));
  EXPECT_EQ(UsabilityRule::characteristic(4), (Index3{2, 2, 0}));
  EXPECT_EQ(UsabilityRule::characteristic(6), (Index3{2, 2, 2}));
}
