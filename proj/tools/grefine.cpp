// grefine: evolutionary refinement of seed graphs against a reference corpus.
//
//   grefine stats    --dataset data/MUTAG
//   grefine refine   --dataset data/MUTAG --seeds seeds.json --out out/ [--config run.toml]
//   grefine evaluate --dataset data/MUTAG --graphs out/refined.json --out eval/

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "grefine/commands.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> dataset, format, seeds, graphs, out;
  std::optional<int> class_label;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> pop, gens, threads;
  std::optional<double> wd, wc, ws, we, sigma;
  bool dump_genomes = false;
  bool no_histograms = false;
  bool quiet = false;
};

void add_common(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--config", o.config, "TOML run config");
  cmd.add_option("--dataset", o.dataset, "reference dataset (TUDataset directory or JSON file)");
  cmd.add_option("--format", o.format, "dataset format")->check(CLI::IsMember({"tud", "json"}));
  cmd.add_option("--class", o.class_label, "restrict to one class");
  cmd.add_option("--out", o.out, "output directory");
  cmd.add_option("--wd", o.wd, "degree MMD weight");
  cmd.add_option("--wc", o.wc, "clustering MMD weight");
  cmd.add_option("--ws", o.ws, "spectral MMD weight");
  cmd.add_option("--we", o.we, "edge penalty weight");
  cmd.add_option("--sigma", o.sigma, "Gaussian kernel bandwidth");
  cmd.add_flag("--no-histograms", o.no_histograms, "skip histogram CSV dumps");
}

grefine::RunConfig build_config(const Overrides& o) {
  grefine::RunConfig cfg;
  if (!o.config.empty()) grefine::apply_config_file(o.config, cfg);
  if (o.dataset) cfg.dataset = *o.dataset;
  if (o.format) cfg.format = grefine::parse_format(*o.format);
  if (o.class_label) cfg.class_filter = *o.class_label;
  if (o.seeds) cfg.seeds = *o.seeds;
  if (o.graphs) cfg.graphs = *o.graphs;
  if (o.out) cfg.out = *o.out;
  if (o.seed) cfg.evolution.master_seed = *o.seed;
  if (o.pop) cfg.evolution.population_size = *o.pop;
  if (o.gens) cfg.evolution.generations = *o.gens;
  if (o.wd) cfg.weights.degree = *o.wd;
  if (o.wc) cfg.weights.clustering = *o.wc;
  if (o.ws) cfg.weights.spectral = *o.ws;
  if (o.we) cfg.weights.edge = *o.we;
  if (o.sigma) cfg.weights.sigma = *o.sigma;
  if (o.dump_genomes) cfg.dump_genomes = true;
  if (o.no_histograms) cfg.histograms = false;
  if (o.quiet) cfg.progress = false;
  if (o.threads) {
    cfg.threads = *o.threads;
  } else if (auto env = grefine::threads_from_env()) {
    cfg.threads = *env;
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolutionary edge-edit refinement of graphs against a reference corpus"};
  app.require_subcommand(1);
  Overrides o;

  auto* refine = app.add_subcommand("refine", "refine seed graphs");
  add_common(*refine, o);
  refine->add_option("--seeds", o.seeds, "seed graphs (JSON)");
  refine->add_option("--seed", o.seed, "master seed");
  refine->add_option("--pop", o.pop, "population size");
  refine->add_option("--gens", o.gens, "generations");
  refine->add_option("--threads", o.threads, "evaluation workers (fallback: GREFINE_THREADS)");
  refine->add_flag("--dump-genomes", o.dump_genomes, "write best genomes, one gene per line");
  refine->add_flag("--quiet", o.quiet, "suppress per-generation progress");

  auto* evaluate = app.add_subcommand("evaluate", "score a graph set against the corpus");
  add_common(*evaluate, o);
  evaluate->add_option("--graphs", o.graphs, "graphs to evaluate (JSON)");

  auto* stats = app.add_subcommand("stats", "dataset summary");
  stats->add_option("--config", o.config, "TOML run config");
  stats->add_option("--dataset", o.dataset, "dataset");
  stats->add_option("--format", o.format, "dataset format")->check(CLI::IsMember({"tud", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    const grefine::RunConfig cfg = build_config(o);
    if (refine->parsed()) return grefine::cmd_refine(cfg, std::cerr);
    if (evaluate->parsed()) return grefine::cmd_evaluate(cfg, std::cout);
    if (stats->parsed()) return grefine::cmd_stats(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "grefine: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
