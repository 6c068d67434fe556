#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "grefine/graph.hpp"
#include "grefine/metrics.hpp"

namespace grefine {

struct FitnessWeights {
  double degree = 1.0;      // w_d
  double clustering = 1.0;  // w_c
  double spectral = 1.0;    // w_s
  double edge = 0.05;       // w_e
  double sigma = 1.0;       // kernel bandwidth

  void validate() const {
    if (degree < 0 || clustering < 0 || spectral < 0 || edge < 0) {
      throw std::invalid_argument("fitness weights must be non-negative");
    }
    if (degree == 0 && clustering == 0 && spectral == 0) {
      throw std::invalid_argument("at least one of the MMD weights must be positive");
    }
    if (!(sigma > 0)) throw std::invalid_argument("kernel bandwidth sigma must be positive");
  }
};

// Lower is better. `total` is the weighted sum; the components are raw
// (unweighted MMD^2, weighted edge penalty).
struct FitnessValue {
  double total = 0.0;
  double mmd_degree = 0.0;
  double mmd_clustering = 0.0;
  double mmd_spectral = 0.0;
  double edge_penalty = 0.0;

  friend bool operator==(const FitnessValue&, const FitnessValue&) = default;
};

// Per-class reference statistics. Immutable after construction.
class CorpusStats {
 public:
  CorpusStats(int class_label, FeatureRange degree_range, FeatureRange spectral_range,
              std::size_t bins, MmdReference degree, MmdReference clustering,
              MmdReference spectral, double edge_target, std::size_t graph_count)
      : class_label_(class_label),
        degree_range_(degree_range),
        spectral_range_(spectral_range),
        bins_(bins),
        degree_(std::move(degree)),
        clustering_(std::move(clustering)),
        spectral_(std::move(spectral)),
        edge_target_(edge_target),
        graph_count_(graph_count) {}

  int class_label() const noexcept { return class_label_; }
  std::size_t bins() const noexcept { return bins_; }
  const FeatureRange& degree_range() const noexcept { return degree_range_; }
  FeatureRange clustering_range() const noexcept { return {0.0, 1.0}; }
  const FeatureRange& spectral_range() const noexcept { return spectral_range_; }
  const MmdReference& degree() const noexcept { return degree_; }
  const MmdReference& clustering() const noexcept { return clustering_; }
  const MmdReference& spectral() const noexcept { return spectral_; }
  double edge_target() const noexcept { return edge_target_; }
  std::size_t graph_count() const noexcept { return graph_count_; }
  double sigma() const noexcept { return degree_.sigma(); }

 private:
  int class_label_;
  FeatureRange degree_range_;
  FeatureRange spectral_range_;
  std::size_t bins_;
  MmdReference degree_;
  MmdReference clustering_;
  MmdReference spectral_;
  double edge_target_;
  std::size_t graph_count_;
};

// Ranges come from the corpus extrema: degree [0, max degree], clustering
// [0, 1], spectrum [0, max eigenvalue]. A degenerate maximum of zero widens
// to 1 so the range stays non-empty.
inline CorpusStats build_corpus_stats(std::span<const Graph> graphs, int class_label,
                                      double sigma = 1.0, std::size_t bins = kDefaultBins) {
  std::vector<const Graph*> members;
  for (const auto& g : graphs) {
    if (g.class_label() == class_label && g.node_count() > 0) members.push_back(&g);
  }
  if (members.empty()) {
    throw std::invalid_argument("build_corpus_stats: no non-empty graphs of class " +
                                std::to_string(class_label));
  }

  std::vector<SpectralSignature> spectra;
  spectra.reserve(members.size());
  std::size_t max_degree = 0;
  double max_eigenvalue = 0.0;
  double edge_sum = 0.0;
  for (const Graph* g : members) {
    for (auto d : g->degrees()) max_degree = std::max(max_degree, d);
    spectra.push_back(laplacian_spectrum(*g));
    max_eigenvalue = std::max(max_eigenvalue, spectra.back().eigenvalues.back());
    edge_sum += static_cast<double>(g->edge_count());
  }

  const FeatureRange degree_range{0.0, max_degree > 0 ? static_cast<double>(max_degree) : 1.0};
  const FeatureRange spectral_range{0.0, max_eigenvalue > 0.0 ? max_eigenvalue : 1.0};

  std::vector<FeatureHistogram> deg, clu, spe;
  for (std::size_t i = 0; i < members.size(); ++i) {
    deg.push_back(degree_histogram(*members[i], degree_range, bins));
    clu.push_back(clustering_histogram(*members[i], bins));
    spe.push_back(spectral_histogram(spectra[i], spectral_range, bins));
  }

  return CorpusStats(class_label, degree_range, spectral_range, bins,
                     MmdReference(std::move(deg), sigma), MmdReference(std::move(clu), sigma),
                     MmdReference(std::move(spe), sigma),
                     edge_sum / static_cast<double>(members.size()), members.size());
}

// Histograms of one graph in a corpus's feature space.
struct GraphFeatures {
  FeatureHistogram degree;
  FeatureHistogram clustering;
  FeatureHistogram spectral;
};

inline GraphFeatures graph_features(const Graph& g, const CorpusStats& stats) {
  return {degree_histogram(g, stats.degree_range(), stats.bins()),
          clustering_histogram(g, stats.bins()),
          spectral_histogram(laplacian_spectrum(g), stats.spectral_range(), stats.bins())};
}

// F = w_d MMD_d + w_c MMD_c + w_s MMD_s + w_e | |E| - E_target |
inline FitnessValue evaluate(const Graph& g, const CorpusStats& stats, const FitnessWeights& w) {
  if (g.node_count() == 0) throw std::invalid_argument("evaluate: empty graph");
  if (w.sigma != stats.sigma()) {
    throw std::invalid_argument("evaluate: weights sigma differs from the corpus kernel bandwidth");
  }
  const auto features = graph_features(g, stats);
  FitnessValue f;
  f.mmd_degree = stats.degree().mmd(features.degree);
  f.mmd_clustering = stats.clustering().mmd(features.clustering);
  f.mmd_spectral = stats.spectral().mmd(features.spectral);
  f.edge_penalty =
      w.edge * std::abs(static_cast<double>(g.edge_count()) - stats.edge_target());
  f.total = w.degree * f.mmd_degree + w.clustering * f.mmd_clustering +
            w.spectral * f.mmd_spectral + f.edge_penalty;
  return f;
}

}  // namespace grefine
