#pragma once

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

#include <toml.hpp>

#include "grefine/evolution.hpp"
#include "grefine/fitness.hpp"
#include "grefine/genotype.hpp"

namespace grefine {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DatasetFormat { kTud, kJson };

inline DatasetFormat parse_format(std::string_view name) {
  if (name == "tud") return DatasetFormat::kTud;
  if (name == "json") return DatasetFormat::kJson;
  throw ConfigError("unknown dataset format '" + std::string(name) + "' (expected tud|json)");
}

// Everything a command needs.
struct RunConfig {
  std::filesystem::path dataset;
  DatasetFormat format = DatasetFormat::kTud;
  std::optional<int> class_filter;
  std::filesystem::path seeds;
  std::filesystem::path graphs;
  std::filesystem::path out = "out";
  FitnessWeights weights;
  std::size_t bins = kDefaultBins;
  EvolutionConfig evolution;
  std::size_t threads = 1;
  bool dump_genomes = false;
  bool histograms = true;
  bool progress = true;

  void validate() const {
    weights.validate();
    evolution.validate();
    if (bins == 0) throw ConfigError("bins must be positive");
    if (threads == 0) throw ConfigError("threads must be positive");
  }
};

namespace detail {

inline void reject_unknown(const toml::table& table, std::string_view section,
                           std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, node] : table) {
    bool known = false;
    for (auto a : allowed) known = known || key.str() == a;
    if (!known) {
      throw ConfigError("unknown config key '" + std::string(section) +
                        (section.empty() ? "" : ".") + std::string(key.str()) + "'");
    }
  }
}

template <class T>
T require(const toml::node& node, std::string_view name) {
  if constexpr (std::is_same_v<T, double>) {
    if (auto v = node.value<double>()) return *v;
  } else if constexpr (std::is_same_v<T, bool>) {
    if (auto v = node.as_boolean()) return v->get();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (auto v = node.as_string()) return v->get();
  } else {
    if (auto v = node.as_integer()) {
      if constexpr (std::is_unsigned_v<T>) {
        if (v->get() < 0) throw ConfigError("config key '" + std::string(name) + "' must be >= 0");
      }
      return static_cast<T>(v->get());
    }
  }
  throw ConfigError("config key '" + std::string(name) + "' has the wrong type");
}

template <class T>
void read_into(const toml::table& table, std::string_view key, std::string_view section, T& out) {
  if (const toml::node* node = table.get(key)) {
    out = require<T>(*node, std::string(section) + "." + std::string(key));
  }
}

inline const toml::table* section(const toml::table& root, std::string_view name) {
  const toml::node* node = root.get(name);
  if (!node) return nullptr;
  if (!node->is_table()) throw ConfigError("config section '" + std::string(name) + "' must be a table");
  return node->as_table();
}

}  // namespace detail

// Applies a TOML config on top of `cfg`. Unknown sections and keys are
// rejected. Relative paths resolve against the config file's directory.
inline void apply_config_toml(std::string_view text, RunConfig& cfg,
                              const std::filesystem::path& base_dir = {}) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + std::string(e.description()));
  }
  detail::reject_unknown(root, "", {"dataset", "run", "fitness", "evolution"});
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return (path.is_relative() && !base_dir.empty()) ? base_dir / path : path;
  };

  if (const auto* t = detail::section(root, "dataset")) {
    detail::reject_unknown(*t, "dataset", {"path", "format", "class"});
    std::string path, format;
    detail::read_into(*t, "path", "dataset", path);
    if (!path.empty()) cfg.dataset = resolve(path);
    detail::read_into(*t, "format", "dataset", format);
    if (!format.empty()) cfg.format = parse_format(format);
    if (t->contains("class")) {
      int label = 0;
      detail::read_into(*t, "class", "dataset", label);
      cfg.class_filter = label;
    }
  }
  if (const auto* t = detail::section(root, "run")) {
    detail::reject_unknown(*t, "run",
                           {"seeds", "graphs", "out", "threads", "dump_genomes", "histograms",
                            "progress"});
    std::string seeds, graphs, out;
    detail::read_into(*t, "seeds", "run", seeds);
    if (!seeds.empty()) cfg.seeds = resolve(seeds);
    detail::read_into(*t, "graphs", "run", graphs);
    if (!graphs.empty()) cfg.graphs = resolve(graphs);
    detail::read_into(*t, "out", "run", out);
    if (!out.empty()) cfg.out = resolve(out);
    detail::read_into(*t, "threads", "run", cfg.threads);
    detail::read_into(*t, "dump_genomes", "run", cfg.dump_genomes);
    detail::read_into(*t, "histograms", "run", cfg.histograms);
    detail::read_into(*t, "progress", "run", cfg.progress);
  }
  if (const auto* t = detail::section(root, "fitness")) {
    detail::reject_unknown(*t, "fitness", {"wd", "wc", "ws", "we", "sigma", "bins"});
    detail::read_into(*t, "wd", "fitness", cfg.weights.degree);
    detail::read_into(*t, "wc", "fitness", cfg.weights.clustering);
    detail::read_into(*t, "ws", "fitness", cfg.weights.spectral);
    detail::read_into(*t, "we", "fitness", cfg.weights.edge);
    detail::read_into(*t, "sigma", "fitness", cfg.weights.sigma);
    detail::read_into(*t, "bins", "fitness", cfg.bins);
  }
  if (const auto* t = detail::section(root, "evolution")) {
    detail::reject_unknown(*t, "evolution",
                           {"population", "generations", "crossover_rate", "mutation_rate",
                            "tournament_size", "elitism", "seed", "swap_strict", "op_probs"});
    auto& evo = cfg.evolution;
    detail::read_into(*t, "population", "evolution", evo.population_size);
    detail::read_into(*t, "generations", "evolution", evo.generations);
    detail::read_into(*t, "crossover_rate", "evolution", evo.crossover_rate);
    detail::read_into(*t, "mutation_rate", "evolution", evo.mutation_rate);
    detail::read_into(*t, "tournament_size", "evolution", evo.tournament_size);
    detail::read_into(*t, "elitism", "evolution", evo.elitism);
    detail::read_into(*t, "seed", "evolution", evo.master_seed);
    detail::read_into(*t, "swap_strict", "evolution", evo.express.swap_strict);
    if (const auto* probs = detail::section(*t, "op_probs")) {
      // A partial table replaces only the listed opcodes.
      for (const auto& [key, node] : *probs) {
        std::string name(key.str());
        for (auto& ch : name) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        Opcode op;
        try {
          op = parse_opcode(name);
        } catch (const std::invalid_argument&) {
          throw ConfigError("unknown config key 'evolution.op_probs." + std::string(key.str()) + "'");
        }
        evo.op_probs.set(op, detail::require<double>(node, "evolution.op_probs." + std::string(key.str())));
      }
    }
  }
}

inline void apply_config_file(const std::filesystem::path& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  apply_config_toml(buffer.str(), cfg, path.parent_path());
}

// GREFINE_THREADS, when set to a positive integer.
inline std::optional<std::size_t> threads_from_env() {
  const char* value = std::getenv("GREFINE_THREADS");
  if (!value || !*value) return std::nullopt;
  char* end = nullptr;
  const long long n = std::strtoll(value, &end, 10);
  if (*end != '\0' || n <= 0) throw ConfigError("GREFINE_THREADS must be a positive integer");
  return static_cast<std::size_t>(n);
}

}  // namespace grefine
