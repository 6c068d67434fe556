#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "grefine/corpus_io.hpp"
#include "grefine/evolution.hpp"
#include "grefine/fitness.hpp"
#include "grefine/genotype.hpp"
#include "grefine/metrics.hpp"
#include "grefine/parallel.hpp"
#include "grefine/rng.hpp"
#include "grefine/run_config.hpp"

namespace grefine {

inline std::string fixed(double value, int precision = 9) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(precision) << value;
  return out.str();
}

inline Dataset load_dataset(const RunConfig& cfg) {
  if (cfg.dataset.empty()) throw ConfigError("no dataset given (--dataset)");
  return cfg.format == DatasetFormat::kTud ? load_tudataset(cfg.dataset)
                                           : load_json_dataset(cfg.dataset);
}

// Lazily built per-class statistics over one dataset.
class CorpusCache {
 public:
  CorpusCache(const Dataset& dataset, double sigma, std::size_t bins)
      : dataset_(dataset), sigma_(sigma), bins_(bins) {}

  const CorpusStats& get(int label) {
    auto it = cache_.find(label);
    if (it != cache_.end()) return it->second;
    if (!dataset_.class_index.contains(label)) {
      throw ConfigError("class " + std::to_string(label) + " is absent from dataset '" +
                        dataset_.name + "'");
    }
    const auto members = dataset_.graphs_of_class(label);
    return cache_.emplace(label, build_corpus_stats(members, label, sigma_, bins_)).first->second;
  }

  double mean_nodes(int label) const {
    const auto& idx = dataset_.class_index.at(label);
    double s = 0.0;
    for (auto i : idx) s += static_cast<double>(dataset_.graphs[i].node_count());
    return s / static_cast<double>(idx.size());
  }

 private:
  const Dataset& dataset_;
  double sigma_;
  std::size_t bins_;
  std::map<int, CorpusStats> cache_;
};

// Bin-wise mean of histograms sharing one binning.
inline FeatureHistogram mean_histogram(const std::vector<FeatureHistogram>& hs) {
  std::vector<double> acc(hs.front().bins(), 0.0);
  for (const auto& h : hs) {
    for (std::size_t b = 0; b < acc.size(); ++b) acc[b] += h.mass(b);
  }
  for (auto& m : acc) m /= static_cast<double>(hs.size());
  return FeatureHistogram::from_masses(hs.front().range(), std::move(acc));
}

inline void write_histogram_csv(const std::filesystem::path& path, const FeatureHistogram& h) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "bin_lo,bin_hi,mass\n";
  for (std::size_t b = 0; b < h.bins(); ++b) {
    out << fixed(h.bin_lo(b)) << ',' << fixed(h.bin_hi(b)) << ',' << fixed(h.mass(b)) << '\n';
  }
}

// Writes mean degree/clustering/spectral histograms of `graphs` in the
// corpus feature space as <prefix>_<metric>.csv.
inline void write_histogram_set(const std::filesystem::path& dir, const std::string& prefix,
                                const std::vector<Graph>& graphs, const CorpusStats& stats) {
  std::vector<FeatureHistogram> deg, clu, spe;
  for (const auto& g : graphs) {
    auto f = graph_features(g, stats);
    deg.push_back(std::move(f.degree));
    clu.push_back(std::move(f.clustering));
    spe.push_back(std::move(f.spectral));
  }
  if (graphs.empty()) return;
  write_histogram_csv(dir / (prefix + "_degree.csv"), mean_histogram(deg));
  write_histogram_csv(dir / (prefix + "_clustering.csv"), mean_histogram(clu));
  write_histogram_csv(dir / (prefix + "_spectral.csv"), mean_histogram(spe));
}

inline void write_reference_histograms(const std::filesystem::path& dir, const std::string& prefix,
                                       const CorpusStats& stats) {
  write_histogram_csv(dir / (prefix + "_degree.csv"), mean_histogram(stats.degree().histograms()));
  write_histogram_csv(dir / (prefix + "_clustering.csv"),
                      mean_histogram(stats.clustering().histograms()));
  write_histogram_csv(dir / (prefix + "_spectral.csv"),
                      mean_histogram(stats.spectral().histograms()));
}

inline std::string history_csv(const RunResult& result) {
  std::ostringstream out;
  out << "generation,best_total,mmd_d,mmd_c,mmd_s,edge_penalty\n";
  for (const auto& rec : result.history) {
    out << rec.generation << ',' << fixed(rec.best.total, 12) << ','
        << fixed(rec.best.mmd_degree, 12) << ',' << fixed(rec.best.mmd_clustering, 12) << ','
        << fixed(rec.best.mmd_spectral, 12) << ',' << fixed(rec.best.edge_penalty, 12) << '\n';
  }
  return out.str();
}

inline std::string progress_line(const GenerationRecord& rec) {
  std::ostringstream out;
  out << "gen=" << rec.generation << " best=" << fixed(rec.best.total, 6)
      << " mean=" << fixed(rec.mean_total, 6) << " mmd_d=" << fixed(rec.best.mmd_degree, 6)
      << " mmd_c=" << fixed(rec.best.mmd_clustering, 6)
      << " mmd_s=" << fixed(rec.best.mmd_spectral, 6)
      << " pedge=" << fixed(rec.best.edge_penalty, 6);
  return out.str();
}

// Per-class aggregate over a graph set.
struct ClassSummary {
  std::size_t graphs = 0;
  double nodes = 0.0;
  double edges = 0.0;
  FitnessValue mean;
};

inline void accumulate(ClassSummary& s, const Graph& g, const FitnessValue& f) {
  ++s.graphs;
  s.nodes += static_cast<double>(g.node_count());
  s.edges += static_cast<double>(g.edge_count());
  s.mean.total += f.total;
  s.mean.mmd_degree += f.mmd_degree;
  s.mean.mmd_clustering += f.mmd_clustering;
  s.mean.mmd_spectral += f.mmd_spectral;
  s.mean.edge_penalty += f.edge_penalty;
}

inline ClassSummary finish(ClassSummary s) {
  if (s.graphs == 0) return s;
  const double n = static_cast<double>(s.graphs);
  s.nodes /= n;
  s.edges /= n;
  s.mean.total /= n;
  s.mean.mmd_degree /= n;
  s.mean.mmd_clustering /= n;
  s.mean.mmd_spectral /= n;
  s.mean.edge_penalty /= n;
  return s;
}

struct SeedOutcome {
  std::size_t seed_index = 0;
  int class_label = 0;
  Graph seed;
  Graph refined;
  FitnessValue seed_fitness;
  FitnessValue refined_fitness;
  std::optional<RunResult> run;  // empty for unrefinable seeds
};

struct RefineReport {
  std::vector<SeedOutcome> outcomes;
  std::map<int, ClassSummary> seed_summary;
  std::map<int, ClassSummary> refined_summary;
  std::map<int, double> real_nodes;
  std::map<int, double> real_edges;
};

inline std::string refine_summary_csv(const RefineReport& report) {
  std::ostringstream out;
  out << "class,graphs,real_nodes,seed_nodes,real_edges,seed_edges,refined_edges,"
         "seed_mmd_degree,refined_mmd_degree,seed_mmd_clustering,refined_mmd_clustering,"
         "seed_mmd_spectral,refined_mmd_spectral,seed_fitness,refined_fitness\n";
  for (const auto& [label, seed] : report.seed_summary) {
    const auto& ref = report.refined_summary.at(label);
    out << label << ',' << seed.graphs << ',' << fixed(report.real_nodes.at(label), 6) << ','
        << fixed(seed.nodes, 6) << ',' << fixed(report.real_edges.at(label), 6) << ','
        << fixed(seed.edges, 6) << ',' << fixed(ref.edges, 6) << ','
        << fixed(seed.mean.mmd_degree) << ',' << fixed(ref.mean.mmd_degree) << ','
        << fixed(seed.mean.mmd_clustering) << ',' << fixed(ref.mean.mmd_clustering) << ','
        << fixed(seed.mean.mmd_spectral) << ',' << fixed(ref.mean.mmd_spectral) << ','
        << fixed(seed.mean.total) << ',' << fixed(ref.mean.total) << '\n';
  }
  return out.str();
}

inline std::string per_graph_csv(const RefineReport& report) {
  std::ostringstream out;
  out << "seed,class,nodes,seed_edges,refined_edges,seed_fitness,refined_fitness,"
         "seed_mmd_degree,refined_mmd_degree,seed_mmd_clustering,refined_mmd_clustering,"
         "seed_mmd_spectral,refined_mmd_spectral\n";
  for (const auto& o : report.outcomes) {
    out << o.seed_index << ',' << o.class_label << ',' << o.seed.node_count() << ','
        << o.seed.edge_count() << ',' << o.refined.edge_count() << ','
        << fixed(o.seed_fitness.total, 12) << ',' << fixed(o.refined_fitness.total, 12) << ','
        << fixed(o.seed_fitness.mmd_degree, 12) << ',' << fixed(o.refined_fitness.mmd_degree, 12)
        << ',' << fixed(o.seed_fitness.mmd_clustering, 12) << ','
        << fixed(o.refined_fitness.mmd_clustering, 12) << ','
        << fixed(o.seed_fitness.mmd_spectral, 12) << ','
        << fixed(o.refined_fitness.mmd_spectral, 12) << '\n';
  }
  return out.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

// Seed i of a batch runs under derive_seed(master, {i}).
inline std::uint64_t seed_run_seed(std::uint64_t master, std::size_t seed_index) {
  return derive_seed(master, {static_cast<std::uint64_t>(seed_index)});
}

// Refines every seed against its class corpus. Seeds without a label take
// the class filter; with a filter set, seeds of other classes are skipped.
// Seeds run on a pool of cfg.threads workers; results do not depend on the
// pool size. Progress streams live with one thread and is flushed per seed,
// in seed order, otherwise.
inline RefineReport refine_seeds(const std::vector<Graph>& seeds, const Dataset& dataset,
                                 const RunConfig& cfg, std::ostream* log = nullptr) {
  cfg.validate();
  CorpusCache corpus(dataset, cfg.weights.sigma, cfg.bins);
  RefineReport report;
  std::vector<const CorpusStats*> stats_of;

  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const Graph& seed = seeds[i];
    std::optional<int> label = seed.class_label() ? seed.class_label() : cfg.class_filter;
    if (!label) {
      throw ConfigError("seed " + std::to_string(i) + " has no class label and no --class given");
    }
    if (cfg.class_filter && *label != *cfg.class_filter) continue;
    if (seed.node_count() == 0) throw ConfigError("seed " + std::to_string(i) + " is empty");
    const CorpusStats& stats = corpus.get(*label);

    SeedOutcome outcome;
    outcome.seed_index = i;
    outcome.class_label = *label;
    outcome.seed = seed;
    outcome.seed.set_class_label(*label);
    outcome.seed_fitness = evaluate(outcome.seed, stats, cfg.weights);
    outcome.refined = outcome.seed;
    outcome.refined_fitness = outcome.seed_fitness;
    report.outcomes.push_back(std::move(outcome));
    stats_of.push_back(&stats);
  }

  std::vector<std::size_t> runnable;
  for (std::size_t k = 0; k < report.outcomes.size(); ++k) {
    if (report.outcomes[k].seed.node_count() >= 2) runnable.push_back(k);
  }
  const bool live = cfg.threads == 1;
  const std::size_t inner_workers =
      std::max<std::size_t>(1, cfg.threads / std::max<std::size_t>(1, runnable.size()));
  std::vector<std::string> logs(runnable.size());

  parallel_for(runnable.size(), cfg.threads, [&](std::size_t r) {
    SeedOutcome& outcome = report.outcomes[runnable[r]];
    std::ostringstream buffer;
    std::ostream* sink = (log && cfg.progress) ? (live ? log : &buffer) : nullptr;
    EvolutionConfig evo = cfg.evolution;
    evo.master_seed = seed_run_seed(cfg.evolution.master_seed, outcome.seed_index);
    evo.workers = inner_workers;
    if (sink) {
      *sink << "seed " << outcome.seed_index << " class=" << outcome.class_label
            << " nodes=" << outcome.seed.node_count() << " edges=" << outcome.seed.edge_count()
            << '\n';
    }
    ProgressFn progress;
    if (sink) progress = [sink](const GenerationRecord& rec) { *sink << progress_line(rec) << '\n'; };
    outcome.run = run(outcome.seed, *stats_of[runnable[r]], cfg.weights, evo, progress);
    outcome.refined = outcome.run->best_graph;
    outcome.refined_fitness = outcome.run->best_fitness;
    logs[r] = buffer.str();
  });
  if (log && !live) {
    for (const auto& text : logs) *log << text;
  }

  for (const auto& outcome : report.outcomes) {
    accumulate(report.seed_summary[outcome.class_label], outcome.seed, outcome.seed_fitness);
    accumulate(report.refined_summary[outcome.class_label], outcome.refined, outcome.refined_fitness);
  }
  for (auto& [label, s] : report.seed_summary) {
    s = finish(s);
    report.refined_summary[label] = finish(report.refined_summary[label]);
    report.real_nodes[label] = corpus.mean_nodes(label);
    report.real_edges[label] = corpus.get(label).edge_target();
  }
  return report;
}

// refine: writes refined.json, per_graph.csv, summary.csv, history/seed_<i>.csv
// and optionally genomes/ and histograms/.
inline int cmd_refine(const RunConfig& cfg, std::ostream& log) {
  if (cfg.seeds.empty()) throw ConfigError("no seed file given (--seeds)");
  const Dataset dataset = load_dataset(cfg);
  const auto seeds = load_graphs_json(cfg.seeds);
  const RefineReport report = refine_seeds(seeds, dataset, cfg, &log);

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out / "history");
  std::vector<Graph> refined;
  for (const auto& o : report.outcomes) {
    refined.push_back(o.refined);
    RunResult empty;
    write_text(cfg.out / "history" / ("seed_" + std::to_string(o.seed_index) + ".csv"),
               history_csv(o.run ? *o.run : empty));
    if (cfg.dump_genomes) {
      fs::create_directories(cfg.out / "genomes");
      std::ostringstream g;
      if (o.run) write_genome(g, o.run->best_genome);
      write_text(cfg.out / "genomes" / ("seed_" + std::to_string(o.seed_index) + ".txt"), g.str());
    }
    if (o.run && cfg.progress) {
      log << "seed " << o.seed_index << " done: " << fixed(o.seed_fitness.total, 6) << " -> "
          << fixed(o.refined_fitness.total, 6) << " in " << fixed(o.run->wall_seconds, 2) << "s\n";
    }
  }
  save_graphs_json(refined, cfg.out / "refined.json");
  write_text(cfg.out / "summary.csv", refine_summary_csv(report));
  write_text(cfg.out / "per_graph.csv", per_graph_csv(report));

  if (cfg.histograms) {
    fs::create_directories(cfg.out / "histograms");
    CorpusCache corpus(dataset, cfg.weights.sigma, cfg.bins);
    for (const auto& [label, summary] : report.seed_summary) {
      std::vector<Graph> before, after;
      for (const auto& o : report.outcomes) {
        if (o.class_label != label) continue;
        before.push_back(o.seed);
        after.push_back(o.refined);
      }
      const auto& stats = corpus.get(label);
      const std::string tag = "class" + std::to_string(label);
      write_histogram_set(cfg.out / "histograms", tag + "_seed", before, stats);
      write_histogram_set(cfg.out / "histograms", tag + "_refined", after, stats);
      write_reference_histograms(cfg.out / "histograms", tag + "_reference", stats);
    }
  }
  return 0;
}

struct EvaluationReport {
  struct Row {
    std::size_t index = 0;
    int class_label = 0;
    std::size_t nodes = 0;
    std::size_t edges = 0;
    FitnessValue fitness;
  };
  std::vector<Row> rows;
  std::map<int, ClassSummary> summary;
};

// Graphs without a label take the class filter; with a filter set, graphs of
// other classes are skipped.
inline EvaluationReport evaluate_graphs(const std::vector<Graph>& graphs, const Dataset& dataset,
                                        const RunConfig& cfg) {
  cfg.weights.validate();
  CorpusCache corpus(dataset, cfg.weights.sigma, cfg.bins);
  EvaluationReport report;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    std::optional<int> label = graphs[i].class_label() ? graphs[i].class_label() : cfg.class_filter;
    if (!label) {
      throw ConfigError("graph " + std::to_string(i) + " has no class label and no --class given");
    }
    if (cfg.class_filter && *label != *cfg.class_filter) continue;
    const FitnessValue f = evaluate(graphs[i], corpus.get(*label), cfg.weights);
    report.rows.push_back({i, *label, graphs[i].node_count(), graphs[i].edge_count(), f});
    accumulate(report.summary[*label], graphs[i], f);
  }
  for (auto& [label, s] : report.summary) s = finish(s);
  return report;
}

inline std::string evaluation_summary_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "class,graphs,mean_nodes,mean_edges,mmd_degree,mmd_clustering,mmd_spectral,"
         "edge_penalty,fitness\n";
  for (const auto& [label, s] : report.summary) {
    out << label << ',' << s.graphs << ',' << fixed(s.nodes, 6) << ',' << fixed(s.edges, 6) << ','
        << fixed(s.mean.mmd_degree) << ',' << fixed(s.mean.mmd_clustering) << ','
        << fixed(s.mean.mmd_spectral) << ',' << fixed(s.mean.edge_penalty) << ','
        << fixed(s.mean.total) << '\n';
  }
  return out.str();
}

inline std::string evaluation_rows_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "graph,class,nodes,edges,mmd_degree,mmd_clustering,mmd_spectral,edge_penalty,fitness\n";
  for (const auto& r : report.rows) {
    out << r.index << ',' << r.class_label << ',' << r.nodes << ',' << r.edges << ','
        << fixed(r.fitness.mmd_degree, 12) << ',' << fixed(r.fitness.mmd_clustering, 12) << ','
        << fixed(r.fitness.mmd_spectral, 12) << ',' << fixed(r.fitness.edge_penalty, 12) << ','
        << fixed(r.fitness.total, 12) << '\n';
  }
  return out.str();
}

// evaluate: writes evaluation.csv, summary.csv and histograms/, and prints
// the summary to `out`.
inline int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  const auto& path = cfg.graphs.empty() ? cfg.seeds : cfg.graphs;
  if (path.empty()) throw ConfigError("no graph file given (--graphs)");
  const Dataset dataset = load_dataset(cfg);
  const auto graphs = load_graphs_json(path);
  const EvaluationReport report = evaluate_graphs(graphs, dataset, cfg);

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out);
  write_text(cfg.out / "evaluation.csv", evaluation_rows_csv(report));
  const std::string summary = evaluation_summary_csv(report);
  write_text(cfg.out / "summary.csv", summary);
  if (cfg.histograms) {
    fs::create_directories(cfg.out / "histograms");
    CorpusCache corpus(dataset, cfg.weights.sigma, cfg.bins);
    for (const auto& [label, s] : report.summary) {
      std::vector<Graph> members;
      for (const auto& r : report.rows) {
        if (r.class_label == label) members.push_back(graphs[r.index]);
      }
      const auto& stats = corpus.get(label);
      const std::string tag = "class" + std::to_string(label);
      write_histogram_set(cfg.out / "histograms", tag + "_generated", members, stats);
      write_reference_histograms(cfg.out / "histograms", tag + "_reference", stats);
    }
  }
  out << summary;
  return 0;
}

struct DatasetStatsRow {
  std::string scope;
  std::size_t graphs = 0;
  std::size_t classes = 0;
  double avg_nodes = 0.0;
  double avg_edges = 0.0;
};

inline std::vector<DatasetStatsRow> dataset_stats(const Dataset& ds) {
  auto row_for = [&](std::string scope, const std::vector<std::size_t>& idx, std::size_t classes) {
    DatasetStatsRow r{std::move(scope), idx.size(), classes, 0.0, 0.0};
    for (auto i : idx) {
      r.avg_nodes += static_cast<double>(ds.graphs[i].node_count());
      r.avg_edges += static_cast<double>(ds.graphs[i].edge_count());
    }
    if (!idx.empty()) {
      r.avg_nodes /= static_cast<double>(idx.size());
      r.avg_edges /= static_cast<double>(idx.size());
    }
    return r;
  };
  std::vector<std::size_t> all(ds.graphs.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::vector<DatasetStatsRow> rows{row_for("all", all, ds.class_count())};
  for (const auto& [label, idx] : ds.class_index) {
    rows.push_back(row_for("class=" + std::to_string(label), idx, 1));
  }
  return rows;
}

inline std::string dataset_stats_csv(const Dataset& ds) {
  std::ostringstream out;
  out << "dataset,scope,graphs,classes,avg_nodes,avg_edges\n";
  for (const auto& r : dataset_stats(ds)) {
    out << ds.name << ',' << r.scope << ',' << r.graphs << ',' << r.classes << ','
        << fixed(r.avg_nodes, 2) << ',' << fixed(r.avg_edges, 2) << '\n';
  }
  return out.str();
}

inline int cmd_stats(const RunConfig& cfg, std::ostream& out) {
  out << dataset_stats_csv(load_dataset(cfg));
  return 0;
}

}  // namespace grefine
