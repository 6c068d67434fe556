// Refines a 10-node path toward a corpus of 10-rings carrying two or three chords.
//
//   ./refine_ring [master_seed]

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <vector>

#include "grefine/evolution.hpp"
#include "grefine/fitness.hpp"

int main(int argc, char** argv) {
  using namespace grefine;
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;

  std::vector<Graph> corpus;
  for (NodeId shift = 0; shift < 6; ++shift) {
    Graph g = ring_graph(10);
    g.add_edge(shift, (shift + 5) % 10);
    g.add_edge((shift + 2) % 10, (shift + 4) % 10);
    if (shift % 2) g.add_edge((shift + 6) % 10, (shift + 8) % 10);
    g.set_class_label(0);
    corpus.push_back(g);
  }
  const CorpusStats stats = build_corpus_stats(corpus, 0);
  const FitnessWeights weights;

  Graph base(10);
  for (NodeId v = 0; v + 1 < 10; ++v) base.add_edge(v, v + 1);
  EvolutionConfig cfg;
  cfg.population_size = 100;
  cfg.generations = 80;
  cfg.master_seed = seed;

  const RunResult result = run(base, stats, weights, cfg, [](const GenerationRecord& r) {
    if (r.generation % 10 == 0) {
      std::cout << "gen " << r.generation << "  best " << r.best.total << "  mean " << r.mean_total
                << '\n';
    }
  });

  std::cout << "seed fitness    " << evaluate(base, stats, weights).total << '\n'
            << "refined fitness " << result.best_fitness.total << '\n'
            << "edges:";
  for (const auto& [u, v] : result.best_graph.edges()) std::cout << ' ' << u << '-' << v;
  std::cout << "\ngenome:\n";
  write_genome(std::cout, result.best_genome);
}
