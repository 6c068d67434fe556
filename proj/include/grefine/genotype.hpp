#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "grefine/graph.hpp"
#include "grefine/rng.hpp"

namespace grefine {

enum class Opcode : std::uint8_t {
  kToggle,
  kLocalToggle,
  kHop,
  kAdd,
  kLocalAdd,
  kDelete,
  kLocalDelete,
  kSwap,
  kNull,
};

inline constexpr std::size_t kOpcodeCount = 9;

inline constexpr std::array<Opcode, kOpcodeCount> kAllOpcodes = {
    Opcode::kToggle, Opcode::kLocalToggle, Opcode::kHop,    Opcode::kAdd,  Opcode::kLocalAdd,
    Opcode::kDelete, Opcode::kLocalDelete, Opcode::kSwap, Opcode::kNull};

constexpr std::size_t arity(Opcode op) noexcept {
  switch (op) {
    case Opcode::kToggle:
    case Opcode::kAdd:
    case Opcode::kDelete:
      return 2;
    case Opcode::kLocalToggle:
    case Opcode::kLocalAdd:
    case Opcode::kLocalDelete:
    case Opcode::kHop:
      return 3;
    case Opcode::kSwap:
      return 4;
    case Opcode::kNull:
      return 0;
  }
  return 0;
}

constexpr std::string_view opcode_name(Opcode op) noexcept {
  switch (op) {
    case Opcode::kToggle: return "TOGGLE";
    case Opcode::kLocalToggle: return "LOCAL_TOGGLE";
    case Opcode::kHop: return "HOP";
    case Opcode::kAdd: return "ADD";
    case Opcode::kLocalAdd: return "LOCAL_ADD";
    case Opcode::kDelete: return "DELETE";
    case Opcode::kLocalDelete: return "LOCAL_DELETE";
    case Opcode::kSwap: return "SWAP";
    case Opcode::kNull: return "NULL";
  }
  return "?";
}

inline Opcode parse_opcode(std::string_view name) {
  for (auto op : kAllOpcodes) {
    if (opcode_name(op) == name) return op;
  }
  throw std::invalid_argument("unknown opcode '" + std::string(name) + "'");
}

// One edit command. Slots beyond the opcode's arity are kept at zero so that
// value equality is meaningful.
struct Gene {
  Opcode op = Opcode::kNull;
  std::array<NodeId, 4> args{};

  static Gene null() { return {}; }
  static Gene toggle(NodeId u, NodeId v) { return {Opcode::kToggle, {u, v, 0, 0}}; }
  static Gene local_toggle(NodeId u, NodeId w, NodeId v) {
    return {Opcode::kLocalToggle, {u, w, v, 0}};
  }
  static Gene hop(NodeId u, NodeId v, NodeId w) { return {Opcode::kHop, {u, v, w, 0}}; }
  static Gene add(NodeId u, NodeId v) { return {Opcode::kAdd, {u, v, 0, 0}}; }
  static Gene local_add(NodeId u, NodeId w, NodeId v) { return {Opcode::kLocalAdd, {u, w, v, 0}}; }
  static Gene del(NodeId u, NodeId v) { return {Opcode::kDelete, {u, v, 0, 0}}; }
  static Gene local_delete(NodeId u, NodeId w, NodeId v) {
    return {Opcode::kLocalDelete, {u, w, v, 0}};
  }
  static Gene swap(NodeId u, NodeId v, NodeId w, NodeId x) { return {Opcode::kSwap, {u, v, w, x}}; }

  friend bool operator==(const Gene&, const Gene&) = default;
};

using Genome = std::vector<Gene>;

inline std::size_t genome_length_for(std::size_t node_count) { return 2 * node_count; }

inline Genome identity_genome(std::size_t node_count) {
  return Genome(genome_length_for(node_count), Gene::null());
}

// `OPCODE u v [w [x]]`
inline std::string format_gene(const Gene& gene) {
  std::string out(opcode_name(gene.op));
  for (std::size_t i = 0; i < arity(gene.op); ++i) {
    out += ' ';
    out += std::to_string(gene.args[i]);
  }
  return out;
}

inline Gene parse_gene(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::string name;
  if (!(in >> name)) throw std::invalid_argument("empty gene line");
  Gene gene;
  gene.op = parse_opcode(name);
  for (std::size_t i = 0; i < arity(gene.op); ++i) {
    long long value = -1;
    if (!(in >> value) || value < 0) {
      throw std::invalid_argument("gene '" + std::string(line) + "': expected " +
                                  std::to_string(arity(gene.op)) + " node indices");
    }
    gene.args[i] = static_cast<NodeId>(value);
  }
  std::string extra;
  if (in >> extra) throw std::invalid_argument("gene '" + std::string(line) + "': trailing tokens");
  return gene;
}

inline void write_genome(std::ostream& out, const Genome& genome) {
  for (const auto& gene : genome) out << format_gene(gene) << '\n';
}

struct ExpressOptions {
  // Strict Swap: {u,v} and {w,x} must be the only edges among the four
  // nodes. Default follows the worked trace: only the replacement edges
  // must be absent.
  bool swap_strict = false;
};

namespace detail {

inline bool args_distinct(const Gene& gene) {
  const std::size_t k = arity(gene.op);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      if (gene.args[i] == gene.args[j]) return false;
    }
  }
  return true;
}

}  // namespace detail

// Applies one gene in place. Unsatisfied preconditions (including repeated
// arguments) leave the graph unchanged.
inline void apply_gene(Graph& g, const Gene& gene, const ExpressOptions& options = {}) {
  if (gene.op == Opcode::kNull || !detail::args_distinct(gene)) return;
  const auto [a, b, c, d] = gene.args;
  switch (gene.op) {
    case Opcode::kToggle:
      g.toggle_edge(a, b);
      return;
    case Opcode::kAdd:
      g.add_edge(a, b);
      return;
    case Opcode::kDelete:
      g.remove_edge(a, b);
      return;
    case Opcode::kLocalToggle:
      // (u, w, v): path u-w-v required, then acts on {u, v}.
      if (g.has_edge(a, b) && g.has_edge(b, c)) g.toggle_edge(a, c);
      return;
    case Opcode::kLocalAdd:
      if (g.has_edge(a, b) && g.has_edge(b, c)) g.add_edge(a, c);
      return;
    case Opcode::kLocalDelete:
      if (g.has_edge(a, b) && g.has_edge(b, c)) g.remove_edge(a, c);
      return;
    case Opcode::kHop:
      // (u, v, w)
      if (g.has_edge(a, b) && g.has_edge(b, c) && !g.has_edge(a, c)) {
        g.remove_edge(a, b);
        g.add_edge(a, c);
      }
      return;
    case Opcode::kSwap: {
      // (u, v, w, x): {u,v},{w,x} -> {u,x},{v,w}
      if (!g.has_edge(a, b) || !g.has_edge(c, d)) return;
      if (g.has_edge(a, d) || g.has_edge(b, c)) return;
      if (options.swap_strict && (g.has_edge(a, c) || g.has_edge(b, d))) return;
      g.remove_edge(a, b);
      g.remove_edge(c, d);
      g.add_edge(a, d);
      g.add_edge(b, c);
      return;
    }
    case Opcode::kNull:
      return;
  }
}

inline void validate_genome(const Graph& base, const Genome& genome) {
  const std::size_t n = base.node_count();
  if (genome.size() != genome_length_for(n)) {
    throw std::invalid_argument("genome length " + std::to_string(genome.size()) +
                                " does not match 2 x node_count = " +
                                std::to_string(genome_length_for(n)));
  }
  for (std::size_t i = 0; i < genome.size(); ++i) {
    const Gene& gene = genome[i];
    for (std::size_t k = 0; k < arity(gene.op); ++k) {
      if (gene.args[k] >= n) {
        throw std::out_of_range("gene " + std::to_string(i) + " (" + format_gene(gene) +
                                "): argument out of range for node_count " + std::to_string(n));
      }
    }
  }
}

// Applies the genome left to right to a copy of `base`.
inline Graph express(const Graph& base, const Genome& genome, const ExpressOptions& options = {}) {
  validate_genome(base, genome);
  Graph g = base;
  for (const auto& gene : genome) apply_gene(g, gene, options);
  return g;
}

// Probability table over the nine opcodes, indexed by Opcode value.
class OpProbabilities {
 public:
  // Toggle, Add, Delete, LocalToggle at 1/14; everything else at 1/7.
  OpProbabilities() {
    for (auto op : kAllOpcodes) weights_[index(op)] = 1.0 / 7.0;
    for (auto op : {Opcode::kToggle, Opcode::kAdd, Opcode::kDelete, Opcode::kLocalToggle}) {
      weights_[index(op)] = 1.0 / 14.0;
    }
  }

  explicit OpProbabilities(const std::array<double, kOpcodeCount>& weights) : weights_(weights) {}

  double operator[](Opcode op) const { return weights_[index(op)]; }
  void set(Opcode op, double p) { weights_[index(op)] = p; }
  const std::array<double, kOpcodeCount>& weights() const { return weights_; }

  double sum() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

  void validate(double tolerance = 1e-12) const {
    for (double w : weights_) {
      if (!(w >= 0.0)) throw std::invalid_argument("operation probabilities must be non-negative");
    }
    if (std::abs(sum() - 1.0) > tolerance) {
      throw std::invalid_argument("operation probabilities sum to " + std::to_string(sum()) +
                                  ", expected 1");
    }
  }

  // Opcodes whose arity exceeds node_count get weight zero; the remaining
  // mass is renormalised proportionally by the sampler.
  std::array<double, kOpcodeCount> effective_weights(std::size_t node_count) const {
    auto w = weights_;
    for (auto op : kAllOpcodes) {
      if (arity(op) > node_count) w[index(op)] = 0.0;
    }
    if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) {
      w[index(Opcode::kNull)] = 1.0;
    }
    return w;
  }

 private:
  static std::size_t index(Opcode op) { return static_cast<std::size_t>(op); }
  std::array<double, kOpcodeCount> weights_{};
};

// Draws `count` (<= 4) distinct values from [0, n), rejecting repeats of the
// already drawn prefix.
inline void sample_distinct_nodes(std::size_t n, std::size_t count, Rng& rng,
                                  std::array<NodeId, 4>& out) {
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
    NodeId candidate;
    do {
      candidate = pick(rng);
    } while (std::find(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(i), candidate) !=
             out.begin() + static_cast<std::ptrdiff_t>(i));
    out[i] = candidate;
  }
}

inline Gene random_gene(std::size_t node_count, const OpProbabilities& probs, Rng& rng) {
  const auto w = probs.effective_weights(node_count);
  std::discrete_distribution<std::size_t> pick_op(w.begin(), w.end());
  Gene gene;
  gene.op = kAllOpcodes[pick_op(rng)];
  sample_distinct_nodes(node_count, arity(gene.op), rng, gene.args);
  return gene;
}

inline Genome random_genome(std::size_t node_count, const OpProbabilities& probs, Rng& rng) {
  Genome genome(genome_length_for(node_count));
  for (auto& gene : genome) gene = random_gene(node_count, probs, rng);
  return genome;
}

}  // namespace grefine
