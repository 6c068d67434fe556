#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "grefine/graph.hpp"

namespace grefine {

inline constexpr std::size_t kDefaultBins = 10;

// Closed interval over which a feature is binned.
struct FeatureRange {
  double lo = 0.0;
  double hi = 1.0;

  friend bool operator==(const FeatureRange&, const FeatureRange&) = default;
};

// Normalised histogram with equal-width bins over a fixed range. Values
// outside the range clamp to the terminal bins.
class FeatureHistogram {
 public:
  FeatureHistogram(FeatureRange range, std::size_t bins = kDefaultBins)
      : range_(range), masses_(bins, 0.0) {
    if (bins == 0) throw std::invalid_argument("FeatureHistogram: bins must be positive");
    if (!(range.hi > range.lo)) {
      throw std::invalid_argument("FeatureHistogram: range requires hi > lo");
    }
  }

  // Each sample contributes 1/|samples|; an empty sample yields all zeros.
  static FeatureHistogram from_samples(std::span<const double> samples, FeatureRange range,
                                       std::size_t bins = kDefaultBins) {
    FeatureHistogram h(range, bins);
    if (samples.empty()) return h;
    const double unit = 1.0 / static_cast<double>(samples.size());
    for (double x : samples) h.masses_[h.bin_of(x)] += unit;
    return h;
  }

  static FeatureHistogram from_masses(FeatureRange range, std::vector<double> masses) {
    FeatureHistogram h(range, masses.size());
    h.masses_ = std::move(masses);
    return h;
  }

  std::size_t bins() const noexcept { return masses_.size(); }
  const FeatureRange& range() const noexcept { return range_; }
  const std::vector<double>& masses() const noexcept { return masses_; }
  double mass(std::size_t bin) const { return masses_.at(bin); }

  double bin_lo(std::size_t bin) const {
    return range_.lo + (range_.hi - range_.lo) * static_cast<double>(bin) /
                           static_cast<double>(bins());
  }
  double bin_hi(std::size_t bin) const { return bin_lo(bin + 1); }

  std::vector<double> bin_edges() const {
    std::vector<double> edges(bins() + 1);
    for (std::size_t i = 0; i <= bins(); ++i) edges[i] = bin_lo(i);
    return edges;
  }

  // floor((x - lo) * bins / (hi - lo)), clamped. The multiply-first form
  // keeps integer features on exact bin boundaries.
  std::size_t bin_of(double x) const {
    const double scaled = (x - range_.lo) * static_cast<double>(bins()) / (range_.hi - range_.lo);
    if (!(scaled > 0.0)) return 0;
    const auto b = static_cast<std::size_t>(std::floor(scaled));
    return std::min(b, bins() - 1);
  }

  bool same_binning(const FeatureHistogram& other) const {
    return range_ == other.range_ && bins() == other.bins();
  }

  double total_mass() const {
    double s = 0.0;
    for (double m : masses_) s += m;
    return s;
  }

 private:
  FeatureRange range_;
  std::vector<double> masses_;
};

inline std::vector<double> degree_values(const Graph& g) {
  std::vector<double> out(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) out[v] = static_cast<double>(g.degree(v));
  return out;
}

inline FeatureHistogram degree_histogram(const Graph& g, FeatureRange range,
                                         std::size_t bins = kDefaultBins) {
  if (g.node_count() == 0) throw std::invalid_argument("degree_histogram: empty graph");
  const auto values = degree_values(g);
  return FeatureHistogram::from_samples(values, range, bins);
}

// Local clustering coefficient per node: 2 T(v) / (deg (deg - 1)), zero for
// deg < 2.
inline std::vector<double> clustering_coefficients(const Graph& g) {
  std::vector<double> out(g.node_count(), 0.0);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto& nbrs = g.neighbours(v);
    const std::size_t d = nbrs.size();
    if (d < 2) continue;
    std::size_t links = 0;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) {
        if (g.has_edge(nbrs[i], nbrs[j])) ++links;
      }
    }
    out[v] = 2.0 * static_cast<double>(links) / (static_cast<double>(d) * static_cast<double>(d - 1));
  }
  return out;
}

inline FeatureHistogram clustering_histogram(const Graph& g, std::size_t bins = kDefaultBins) {
  const auto values = clustering_coefficients(g);
  return FeatureHistogram::from_samples(values, FeatureRange{0.0, 1.0}, bins);
}

// Eigenvalues of L = D - A, ascending.
struct SpectralSignature {
  std::vector<double> eigenvalues;
};

inline Eigen::MatrixXd laplacian_matrix(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    lap(v, v) = static_cast<double>(g.degree(v));
    for (NodeId u : g.neighbours(v)) lap(v, u) = -1.0;
  }
  return lap;
}

inline SpectralSignature laplacian_spectrum(const Graph& g) {
  if (g.node_count() == 0) throw std::invalid_argument("laplacian_spectrum: empty graph");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian_matrix(g),
                                                              Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("laplacian_spectrum: eigensolver did not converge");
  }
  const auto& ev = solver.eigenvalues();
  SpectralSignature sig;
  sig.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(sig.eigenvalues.begin(), sig.eigenvalues.end());
  return sig;
}

inline FeatureHistogram spectral_histogram(const SpectralSignature& spectrum, FeatureRange range,
                                           std::size_t bins = kDefaultBins) {
  return FeatureHistogram::from_samples(spectrum.eigenvalues, range, bins);
}

// Gaussian RBF over mass vectors: exp(-|a - b|^2 / (2 sigma^2)).
inline double gaussian_kernel(const FeatureHistogram& a, const FeatureHistogram& b, double sigma) {
  double d2 = 0.0;
  const auto& ma = a.masses();
  const auto& mb = b.masses();
  for (std::size_t i = 0; i < ma.size(); ++i) {
    const double diff = ma[i] - mb[i];
    d2 += diff * diff;
  }
  return std::exp(-d2 / (2.0 * sigma * sigma));
}

namespace detail {

inline void check_mmd_inputs(const FeatureHistogram& x, std::span<const FeatureHistogram> ys,
                             double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("mmd: sigma must be positive");
  if (ys.empty()) throw std::invalid_argument("mmd: reference set is empty");
  for (const auto& y : ys) {
    if (!x.same_binning(y)) throw std::invalid_argument("mmd: histograms have mismatched bin edges");
  }
}

}  // namespace detail

// (1/N^2) sum_ij k(y_i, y_j). Symmetric, so each off-diagonal pair is
// evaluated once.
inline double mmd_reference_term(std::span<const FeatureHistogram> ys, double sigma) {
  const std::size_t n = ys.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += gaussian_kernel(ys[i], ys[i], sigma);
    for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * gaussian_kernel(ys[i], ys[j], sigma);
  }
  return s / (static_cast<double>(n) * static_cast<double>(n));
}

// Reference histogram set with its cached self-term.
class MmdReference {
 public:
  MmdReference(std::vector<FeatureHistogram> histograms, double sigma)
      : histograms_(std::move(histograms)), sigma_(sigma) {
    if (histograms_.empty()) throw std::invalid_argument("MmdReference: empty reference set");
    if (!(sigma > 0.0)) throw std::invalid_argument("MmdReference: sigma must be positive");
    for (const auto& h : histograms_) {
      if (!h.same_binning(histograms_.front())) {
        throw std::invalid_argument("MmdReference: histograms have mismatched bin edges");
      }
    }
    self_term_ = mmd_reference_term(histograms_, sigma_);
  }

  const std::vector<FeatureHistogram>& histograms() const noexcept { return histograms_; }
  double sigma() const noexcept { return sigma_; }
  double self_term() const noexcept { return self_term_; }

  // MMD^2 of a single sample against the reference set, clamped at zero.
  double mmd(const FeatureHistogram& x) const {
    if (!x.same_binning(histograms_.front())) {
      throw std::invalid_argument("mmd: histograms have mismatched bin edges");
    }
    double cross = 0.0;
    for (const auto& y : histograms_) cross += gaussian_kernel(x, y, sigma_);
    const double n = static_cast<double>(histograms_.size());
    const double value = gaussian_kernel(x, x, sigma_) - 2.0 * cross / n + self_term_;
    return std::max(0.0, value);
  }

 private:
  std::vector<FeatureHistogram> histograms_;
  double sigma_;
  double self_term_ = 0.0;
};

// k(x,x) - (2/N) sum_i k(x,y_i) + (1/N^2) sum_ij k(y_i,y_j), clamped at zero.
inline double mmd_single_vs_set(const FeatureHistogram& x, std::span<const FeatureHistogram> ys,
                                double sigma) {
  detail::check_mmd_inputs(x, ys, sigma);
  double cross = 0.0;
  for (const auto& y : ys) cross += gaussian_kernel(x, y, sigma);
  const double n = static_cast<double>(ys.size());
  const double value = gaussian_kernel(x, x, sigma) - 2.0 * cross / n + mmd_reference_term(ys, sigma);
  return std::max(0.0, value);
}

}  // namespace grefine
