#include "grefine/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"

namespace grefine {
namespace {

Graph star(std::size_t leaves) {
  Graph g(leaves + 1);
  for (NodeId v = 1; v <= leaves; ++v) g.add_edge(0, v);
  return g;
}

TEST(HistogramTest, RingDegreeMassInOneBin) {
  const auto h = degree_histogram(ring_graph(6), {0, 10});
  EXPECT_DOUBLE_EQ(h.mass(2), 1.0);
  EXPECT_NEAR(h.total_mass(), 1.0, 1e-12);
}

TEST(HistogramTest, StarDegrees) {
  const auto h = degree_histogram(star(5), {0, 10});
  EXPECT_NEAR(h.mass(1), 5.0 / 6, 1e-15);
  EXPECT_NEAR(h.mass(5), 1.0 / 6, 1e-15);
}

TEST(HistogramTest, EmptyGraphIsAnError) {
  EXPECT_THROW(degree_histogram(Graph(0), {0, 10}), std::invalid_argument);
}

TEST(HistogramTest, ClampsOutOfRange) {
  const std::vector<double> xs = {5.2, -1.0, 4.0};
  const auto h = FeatureHistogram::from_samples(xs, {0, 4});
  EXPECT_NEAR(h.mass(9), 2.0 / 3, 1e-15);
  EXPECT_NEAR(h.mass(0), 1.0 / 3, 1e-15);
}

TEST(HistogramTest, EmptySampleIsAllZero) {
  const auto h = FeatureHistogram::from_samples({}, {0, 1});
  EXPECT_EQ(h.total_mass(), 0.0);
}

TEST(HistogramTest, BinEdges) {
  const FeatureHistogram h({0, 4});
  const auto e = h.bin_edges();
  ASSERT_EQ(e.size(), 11u);
  EXPECT_DOUBLE_EQ(e.front(), 0.0);
  EXPECT_DOUBLE_EQ(e.back(), 4.0);
  EXPECT_DOUBLE_EQ(e[5], 2.0);
  EXPECT_THROW(FeatureHistogram({1, 1}), std::invalid_argument);
}

TEST(HistogramTest, MatchesLonghandBinningOnRandomSamples) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> x(-0.5, 7.5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> xs(1 + rng() % 40);
    for (auto& v : xs) v = std::round(x(rng) * 4) / 4;  // hit bin boundaries often
    const auto h = FeatureHistogram::from_samples(xs, {0, 5});
    const auto expected = oracle::histogram(xs, 0, 5, 10);
    for (std::size_t b = 0; b < 10; ++b) ASSERT_NEAR(h.mass(b), expected[b], 1e-12);
    ASSERT_NEAR(h.total_mass(), 1.0, 1e-9);
  }
}

TEST(ClusteringTest, Triangle) {
  EXPECT_EQ(clustering_coefficients(Graph(3, {{0, 1}, {1, 2}, {0, 2}})),
            (std::vector<double>{1, 1, 1}));
}

TEST(ClusteringTest, RingIsTriangleFree) {
  EXPECT_EQ(clustering_coefficients(ring_graph(6)), std::vector<double>(6, 0.0));
}

TEST(ClusteringTest, K4MinusEdge) {
  // Remove {2,3}: nodes 0 and 1 have degree 3 and sit in two triangles.
  const Graph g(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}});
  const auto c = clustering_coefficients(g);
  const auto expected = oracle::clustering_by_triples(g);
  for (std::size_t v = 0; v < 4; ++v) EXPECT_NEAR(c[v], expected[v], 1e-15);
  EXPECT_NEAR(c[0], 2.0 / 3, 1e-15);
  EXPECT_NEAR(c[1], 2.0 / 3, 1e-15);
  EXPECT_NEAR(c[2], 1.0, 1e-15);
}

TEST(ClusteringTest, MatchesTripleEnumeration) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const Graph g = oracle::random_graph(2 + rng() % 25, 0.05 + 0.9 * (rng() % 100) / 100.0, rng);
    const auto c = clustering_coefficients(g);
    const auto expected = oracle::clustering_by_triples(g);
    for (std::size_t v = 0; v < c.size(); ++v) {
      ASSERT_NEAR(c[v], expected[v], 1e-12);
      ASSERT_GE(c[v], 0.0);
      ASSERT_LE(c[v], 1.0);
    }
  }
}

TEST(SpectrumTest, RingClosedForm) {
  const auto s = laplacian_spectrum(ring_graph(6)).eigenvalues;
  std::vector<double> closed;
  for (int k = 0; k < 6; ++k) closed.push_back(2 - 2 * std::cos(2 * std::numbers::pi * k / 6));
  std::sort(closed.begin(), closed.end());
  const std::vector<double> expected = {0, 1, 1, 3, 3, 4};
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(s[i], expected[i], 1e-8);
    EXPECT_NEAR(closed[i], expected[i], 1e-12);
  }
  const auto jacobi = oracle::laplacian_eigenvalues(ring_graph(6));
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(jacobi[i], expected[i], 1e-10);
}

TEST(SpectrumTest, Edgeless) {
  for (double ev : laplacian_spectrum(Graph(5)).eigenvalues) EXPECT_NEAR(ev, 0.0, 1e-12);
}

TEST(SpectrumTest, AgreesWithJacobiAndCountsComponents) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const Graph g = oracle::random_graph(1 + rng() % 20, 0.15, rng);
    const auto s = laplacian_spectrum(g).eigenvalues;
    const auto j = oracle::laplacian_eigenvalues(g);
    ASSERT_EQ(s.size(), j.size());
    for (std::size_t i = 0; i < s.size(); ++i) ASSERT_NEAR(s[i], j[i], 1e-8);
    const auto zeros = std::count_if(s.begin(), s.end(), [](double x) { return std::abs(x) <= 1e-8; });
    ASSERT_EQ(static_cast<std::size_t>(zeros), oracle::component_count(g));
    ASSERT_TRUE(std::is_sorted(s.begin(), s.end()));
  }
}

TEST(SpectralHistogramTest, EdgelessMassInFirstBin) {
  const auto h = spectral_histogram(laplacian_spectrum(Graph(5)), {0, 4});
  EXPECT_NEAR(h.mass(0), 1.0, 1e-12);
}

TEST(SpectralHistogramTest, Ring) {
  const auto h = spectral_histogram(laplacian_spectrum(ring_graph(6)), {0, 4});
  // {0,1,1,3,3,4} over [0,4] with width 0.4: bins 0, 2, 2, 7, 7, 9.
  const auto expected = oracle::histogram({0, 1, 1, 3, 3, 4}, 0, 4, 10);
  EXPECT_NEAR(expected[0], 1.0 / 6, 1e-15);
  EXPECT_NEAR(expected[2], 2.0 / 6, 1e-15);
  EXPECT_NEAR(expected[7], 2.0 / 6, 1e-15);
  EXPECT_NEAR(expected[9], 1.0 / 6, 1e-15);
  // Computed eigenvalues sit within 1e-8 of the bin edges 0 and 4, so
  // compare after clamping the boundary cases.
  EXPECT_NEAR(h.mass(0), 1.0 / 6, 1e-15);
  EXPECT_NEAR(h.mass(2), 2.0 / 6, 1e-15);
  EXPECT_NEAR(h.mass(7), 2.0 / 6, 1e-15);
  EXPECT_NEAR(h.mass(9), 1.0 / 6, 1e-15);
}

std::vector<double> random_masses(std::mt19937_64& rng, std::size_t bins = 10) {
  std::vector<double> m(bins);
  std::exponential_distribution<double> e(1.0);
  double s = 0;
  for (auto& x : m) s += (x = e(rng));
  for (auto& x : m) x /= s;
  return m;
}

TEST(MmdTest, IdenticalIsZero) {
  const auto x = degree_histogram(ring_graph(6), {0, 4});
  const std::vector<FeatureHistogram> ys = {x};
  EXPECT_LE(mmd_single_vs_set(x, ys, 1.0), 1e-12);
  const std::vector<FeatureHistogram> many(5, x);
  EXPECT_LE(mmd_single_vs_set(x, many, 1.0), 1e-12);
}

TEST(MmdTest, SingleReferenceClosedForm) {
  std::mt19937_64 rng(1);
  const auto a = FeatureHistogram::from_masses({0, 1}, random_masses(rng));
  const auto b = FeatureHistogram::from_masses({0, 1}, random_masses(rng));
  double d2 = 0;
  for (std::size_t i = 0; i < 10; ++i) d2 += std::pow(a.mass(i) - b.mass(i), 2);
  const std::vector<FeatureHistogram> ys = {b};
  EXPECT_NEAR(mmd_single_vs_set(a, ys, 1.0), 2 - 2 * std::exp(-d2 / 2), 1e-14);
}

TEST(MmdTest, MatchesNaiveOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 50;
    const double sigma = 0.2 + (rng() % 100) / 50.0;
    const auto x = random_masses(rng);
    std::vector<std::vector<double>> raw;
    std::vector<FeatureHistogram> ys;
    for (std::size_t i = 0; i < n; ++i) {
      raw.push_back(random_masses(rng));
      ys.push_back(FeatureHistogram::from_masses({0, 1}, raw.back()));
    }
    const auto hx = FeatureHistogram::from_masses({0, 1}, x);
    const double expected = oracle::mmd(x, raw, sigma);
    ASSERT_NEAR(mmd_single_vs_set(hx, ys, sigma), expected, 1e-12);
    ASSERT_NEAR(MmdReference(ys, sigma).mmd(hx), expected, 1e-12);
  }
}

TEST(MmdTest, ReferenceOrderDoesNotMatter) {
  std::mt19937_64 rng(5);
  std::vector<FeatureHistogram> ys;
  for (int i = 0; i < 6; ++i) ys.push_back(FeatureHistogram::from_masses({0, 1}, random_masses(rng)));
  const auto x = FeatureHistogram::from_masses({0, 1}, random_masses(rng));
  const double base = mmd_single_vs_set(x, ys, 1.0);
  std::swap(ys[1], ys[4]);
  EXPECT_NEAR(mmd_single_vs_set(x, ys, 1.0), base, 1e-15);
}

TEST(MmdTest, Errors) {
  const auto x = FeatureHistogram::from_masses({0, 1}, std::vector<double>(10, 0.1));
  const auto y = FeatureHistogram::from_masses({0, 2}, std::vector<double>(10, 0.1));
  const std::vector<FeatureHistogram> ys = {y};
  EXPECT_THROW(mmd_single_vs_set(x, ys, 1.0), std::invalid_argument);
  EXPECT_THROW(mmd_single_vs_set(x, std::vector<FeatureHistogram>{x}, 0.0), std::invalid_argument);
  EXPECT_THROW(mmd_single_vs_set(x, std::vector<FeatureHistogram>{}, 1.0), std::invalid_argument);
  EXPECT_THROW(MmdReference(ys, 1.0).mmd(x), std::invalid_argument);
}

}  // namespace
}  // namespace grefine
