#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "grefine/fitness.hpp"
#include "grefine/genotype.hpp"
#include "grefine/graph.hpp"
#include "grefine/parallel.hpp"
#include "grefine/rng.hpp"

namespace grefine {

struct EvolutionConfig {
  std::size_t population_size = 500;
  std::size_t generations = 300;
  double crossover_rate = 0.5;
  double mutation_rate = 0.8;
  std::size_t tournament_size = 5;
  std::size_t elitism = 2;
  OpProbabilities op_probs;
  std::uint64_t master_seed = 0;
  ExpressOptions express;
  // Concurrent evaluation workers. Results do not depend on this value.
  std::size_t workers = 1;

  void validate() const {
    if (population_size <= elitism) {
      throw std::invalid_argument("population_size must exceed elitism");
    }
    if (tournament_size < 1) throw std::invalid_argument("tournament_size must be at least 1");
    if (tournament_size > population_size) {
      throw std::invalid_argument("tournament_size must not exceed population_size");
    }
    auto in_unit = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (!in_unit(crossover_rate) || !in_unit(mutation_rate)) {
      throw std::invalid_argument("crossover_rate and mutation_rate must lie in [0, 1]");
    }
    op_probs.validate();
  }
};

enum class Provenance { kIdentity, kRandom, kOffspring };

struct Individual {
  Genome genome;
  FitnessValue fitness;
  Provenance provenance = Provenance::kRandom;
};

using Population = std::vector<Individual>;

struct GenerationRecord {
  std::size_t generation = 0;
  FitnessValue best;
  double mean_total = 0.0;
};

struct RunResult {
  Genome best_genome;
  Graph best_graph;
  FitnessValue best_fitness;
  std::vector<GenerationRecord> history;
  double wall_seconds = 0.0;
  std::uint64_t master_seed = 0;
};

namespace detail {

// Stream tags keep initialisation and variation draws disjoint.
inline constexpr std::uint64_t kInitStream = 1;
inline constexpr std::uint64_t kVariationStream = 2;

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline bool fitter(const Population& pop, std::size_t a, std::size_t b) {
  const double fa = pop[a].fitness.total;
  const double fb = pop[b].fitness.total;
  return fa < fb || (fa == fb && a < b);
}

}  // namespace detail

// Slot 0 holds the all-Null identity genome; the rest are random genomes,
// each drawn from its own stream derived from the master seed.
inline Population initialize_population(const Graph& base, const EvolutionConfig& cfg) {
  if (base.node_count() < 2) {
    throw std::invalid_argument("initialize_population: base graph needs at least 2 nodes");
  }
  Population pop(cfg.population_size);
  pop[0] = {identity_genome(base.node_count()), {}, Provenance::kIdentity};
  for (std::size_t i = 1; i < pop.size(); ++i) {
    Rng rng = make_rng(cfg.master_seed, {detail::kInitStream, i});
    pop[i] = {random_genome(base.node_count(), cfg.op_probs, rng), {}, Provenance::kRandom};
  }
  return pop;
}

// Samples k indices uniformly with replacement and returns the fittest;
// ties go to the lowest index.
inline std::size_t tournament_select(const Population& pop, std::size_t k, Rng& rng) {
  if (pop.empty() || k == 0) throw std::invalid_argument("tournament_select: empty tournament");
  std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
  std::size_t best = pick(rng);
  for (std::size_t i = 1; i < k; ++i) {
    const std::size_t c = pick(rng);
    if (detail::fitter(pop, c, best)) best = c;
  }
  return best;
}

// Children exchange the segment [first, last).
inline std::pair<Genome, Genome> crossover_at(const Genome& a, const Genome& b, std::size_t first,
                                              std::size_t last) {
  if (a.size() != b.size()) throw std::invalid_argument("crossover: parent lengths differ");
  if (first > last || last > a.size()) throw std::invalid_argument("crossover: invalid cut points");
  Genome c1 = a;
  Genome c2 = b;
  for (std::size_t i = first; i < last; ++i) std::swap(c1[i], c2[i]);
  return {std::move(c1), std::move(c2)};
}

inline std::pair<Genome, Genome> two_point_crossover(const Genome& a, const Genome& b, Rng& rng) {
  if (a.size() != b.size()) throw std::invalid_argument("crossover: parent lengths differ");
  std::uniform_int_distribution<std::size_t> cut(0, a.size());
  std::size_t i = cut(rng);
  std::size_t j = cut(rng);
  if (i > j) std::swap(i, j);
  return crossover_at(a, b, i, j);
}

// Replaces m ~ U{1..4} distinct positions (capped at the genome length) with
// fresh random genes. Returns m.
inline std::size_t mutate_in_place(Genome& genome, std::size_t node_count,
                                   const OpProbabilities& probs, Rng& rng) {
  if (genome.empty()) throw std::invalid_argument("mutate: empty genome");
  const std::size_t m =
      std::min(std::uniform_int_distribution<std::size_t>(1, 4)(rng), genome.size());
  std::vector<std::size_t> positions(genome.size());
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, positions.size() - 1);
    std::swap(positions[i], positions[pick(rng)]);
    genome[positions[i]] = random_gene(node_count, probs, rng);
  }
  return m;
}

inline Genome mutate(Genome genome, std::size_t node_count, const OpProbabilities& probs,
                     Rng& rng) {
  mutate_in_place(genome, node_count, probs, rng);
  return genome;
}

// Expresses and scores the individuals at `slots`, possibly concurrently.
inline void evaluate_individuals(const Graph& base, Population& pop,
                                 std::span<const std::size_t> slots, const CorpusStats& stats,
                                 const FitnessWeights& w, const EvolutionConfig& cfg) {
  parallel_for(slots.size(), cfg.workers, [&](std::size_t k) {
    Individual& ind = pop[slots[k]];
    ind.fitness = evaluate(express(base, ind.genome, cfg.express), stats, w);
  });
}

inline GenerationRecord summarize_generation(const Population& pop, std::size_t generation) {
  std::size_t best = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (detail::fitter(pop, i, best)) best = i;
    sum += pop[i].fitness.total;
  }
  return {generation, pop[best].fitness, sum / static_cast<double>(pop.size())};
}

using ProgressFn = std::function<void(const GenerationRecord&)>;

// Generational GA with elitism. History holds generation 0 (the initial
// population) through `cfg.generations`.
inline RunResult run(const Graph& base, const CorpusStats& stats, const FitnessWeights& w,
                     const EvolutionConfig& cfg, const ProgressFn& progress = {}) {
  cfg.validate();
  w.validate();
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = base.node_count();
  const std::size_t pop_size = cfg.population_size;

  Population pop = initialize_population(base, cfg);
  {
    std::vector<std::size_t> all(pop_size);
    std::iota(all.begin(), all.end(), std::size_t{0});
    evaluate_individuals(base, pop, all, stats, w, cfg);
  }

  RunResult result;
  result.master_seed = cfg.master_seed;
  std::size_t best_slot = 0;
  for (std::size_t i = 1; i < pop_size; ++i) {
    if (detail::fitter(pop, i, best_slot)) best_slot = i;
  }
  result.best_genome = pop[best_slot].genome;
  result.best_fitness = pop[best_slot].fitness;

  auto record = [&](std::size_t generation) {
    result.history.push_back(summarize_generation(pop, generation));
    if (progress) progress(result.history.back());
  };
  record(0);

  std::vector<std::size_t> order(pop_size);
  std::vector<std::size_t> fresh;
  for (std::size_t t = 1; t <= cfg.generations; ++t) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return detail::fitter(pop, a, b); });

    Population next(pop_size);
    for (std::size_t e = 0; e < cfg.elitism; ++e) next[e] = pop[order[e]];

    fresh.clear();
    const std::size_t remaining = pop_size - cfg.elitism;
    const std::size_t pairs = (remaining + 1) / 2;
    for (std::size_t p = 0; p < pairs; ++p) {
      Rng rng = make_rng(cfg.master_seed, {detail::kVariationStream, t, p});
      const std::size_t ia = tournament_select(pop, cfg.tournament_size, rng);
      const std::size_t ib = tournament_select(pop, cfg.tournament_size, rng);
      const Individual& pa = pop[ia];
      const Individual& pb = pop[ib];

      std::pair<Genome, Genome> children;
      if (detail::uniform01(rng) < cfg.crossover_rate) {
        children = two_point_crossover(pa.genome, pb.genome, rng);
      } else {
        children = {pa.genome, pb.genome};
      }
      Genome* kids[2] = {&children.first, &children.second};
      for (Genome* kid : kids) {
        if (detail::uniform01(rng) < cfg.mutation_rate) {
          mutate_in_place(*kid, n, cfg.op_probs, rng);
        }
      }

      for (std::size_t c = 0; c < 2; ++c) {
        const std::size_t slot = cfg.elitism + 2 * p + c;
        if (slot >= pop_size) break;
        Individual& child = next[slot];
        child.genome = std::move(*kids[c]);
        child.provenance = Provenance::kOffspring;
        // A genome identical to a parent inherits its score.
        if (child.genome == pa.genome) {
          child.fitness = pa.fitness;
        } else if (child.genome == pb.genome) {
          child.fitness = pb.fitness;
        } else {
          fresh.push_back(slot);
        }
      }
    }

    evaluate_individuals(base, next, fresh, stats, w, cfg);
    pop = std::move(next);

    for (std::size_t i = 0; i < pop_size; ++i) {
      if (pop[i].fitness.total < result.best_fitness.total) {
        result.best_fitness = pop[i].fitness;
        result.best_genome = pop[i].genome;
      }
    }
    record(t);
  }

  result.best_graph = express(base, result.best_genome, cfg.express);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace grefine
