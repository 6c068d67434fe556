#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "grefine/graph.hpp"

namespace grefine {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Dataset {
  std::string name;
  std::vector<Graph> graphs;
  // Normalised (0-based) class -> indices into `graphs`.
  std::map<int, std::vector<std::size_t>> class_index;
  // Normalised class -> label as written in the source files.
  std::map<int, long long> raw_labels;

  std::size_t class_count() const { return class_index.size(); }

  // Graphs below two nodes are kept but cannot be edited meaningfully.
  bool refinable(std::size_t i) const { return graphs.at(i).node_count() >= 2; }

  std::vector<Graph> graphs_of_class(int label) const {
    std::vector<Graph> out;
    if (auto it = class_index.find(label); it != class_index.end()) {
      for (auto i : it->second) out.push_back(graphs[i]);
    }
    return out;
  }

  void rebuild_index() {
    class_index.clear();
    for (std::size_t i = 0; i < graphs.size(); ++i) {
      if (!graphs[i].class_label()) {
        throw DatasetError("dataset '" + name + "': graph " + std::to_string(i) +
                           " has no class label");
      }
      class_index[*graphs[i].class_label()].push_back(i);
    }
  }
};

namespace detail {

// Reads a file of integer rows. Commas and whitespace both separate tokens;
// blank lines are skipped.
inline std::vector<std::vector<long long>> read_integer_rows(const std::filesystem::path& path,
                                                             std::size_t expected_columns) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open " + path.string());
  std::vector<std::vector<long long>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream tokens(line);
    std::vector<long long> row;
    std::string token;
    while (tokens >> token) {
      std::size_t used = 0;
      long long value = 0;
      try {
        value = std::stoll(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) {
        throw DatasetError(path.string() + ":" + std::to_string(line_no) +
                           ": non-integer token '" + token + "'");
      }
      row.push_back(value);
    }
    if (row.empty()) continue;
    if (row.size() != expected_columns) {
      throw DatasetError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                         std::to_string(expected_columns) + " value(s), found " +
                         std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::filesystem::path find_prefix(const std::filesystem::path& dir, std::string& name) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DatasetError("not a directory: " + dir.string());
  std::vector<std::string> candidates;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string file = entry.path().filename().string();
    constexpr std::string_view suffix = "_A.txt";
    if (file.size() > suffix.size() && file.ends_with(suffix)) {
      candidates.push_back(file.substr(0, file.size() - suffix.size()));
    }
  }
  if (candidates.empty()) throw DatasetError("missing <DS>_A.txt in " + dir.string());
  std::sort(candidates.begin(), candidates.end());
  name = candidates.front();
  return dir / name;
}

}  // namespace detail

// Loads a TUDataset-format directory: <DS>_A.txt (1-based global edge list),
// <DS>_graph_indicator.txt and <DS>_graph_labels.txt. Node and edge
// attribute files are ignored. Edges are deduplicated, node ids reindexed
// per graph, and class labels mapped to 0..k-1 in ascending raw order.
inline Dataset load_tudataset(const std::filesystem::path& dir) {
  Dataset ds;
  const auto prefix = detail::find_prefix(dir, ds.name);
  const std::filesystem::path a_file = prefix.string() + "_A.txt";
  const std::filesystem::path ind_file = prefix.string() + "_graph_indicator.txt";
  const std::filesystem::path lab_file = prefix.string() + "_graph_labels.txt";

  const auto indicator = detail::read_integer_rows(ind_file, 1);
  const auto labels = detail::read_integer_rows(lab_file, 1);
  const std::size_t graph_total = labels.size();

  std::set<long long> distinct;
  for (const auto& row : labels) distinct.insert(row[0]);
  std::map<long long, int> normalised;
  for (long long raw : distinct) {
    const int label = static_cast<int>(normalised.size());
    normalised[raw] = label;
    ds.raw_labels[label] = raw;
  }

  // Per-node (graph, local id).
  std::vector<std::size_t> node_graph(indicator.size());
  std::vector<NodeId> node_local(indicator.size());
  std::vector<std::size_t> sizes(graph_total, 0);
  for (std::size_t i = 0; i < indicator.size(); ++i) {
    const long long gid = indicator[i][0];
    if (gid < 1 || static_cast<std::size_t>(gid) > graph_total) {
      throw DatasetError(ind_file.string() + ":" + std::to_string(i + 1) + ": graph id " +
                         std::to_string(gid) + " outside 1.." + std::to_string(graph_total));
    }
    node_graph[i] = static_cast<std::size_t>(gid - 1);
    node_local[i] = static_cast<NodeId>(sizes[node_graph[i]]++);
  }

  ds.graphs.reserve(graph_total);
  for (std::size_t g = 0; g < graph_total; ++g) {
    ds.graphs.emplace_back(sizes[g], normalised.at(labels[g][0]));
  }

  const auto edges = detail::read_integer_rows(a_file, 2);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const long long u = edges[e][0];
    const long long v = edges[e][1];
    const auto context = [&] { return a_file.string() + ": edge row " + std::to_string(e + 1); };
    for (long long x : {u, v}) {
      if (x < 1 || static_cast<std::size_t>(x) > indicator.size()) {
        throw DatasetError(context() + ": dangling node id " + std::to_string(x));
      }
    }
    const auto iu = static_cast<std::size_t>(u - 1);
    const auto iv = static_cast<std::size_t>(v - 1);
    if (node_graph[iu] != node_graph[iv]) {
      throw DatasetError(context() + ": edge joins nodes of different graphs");
    }
    if (iu == iv) continue;
    ds.graphs[node_graph[iu]].add_edge(node_local[iu], node_local[iv]);
  }

  ds.rebuild_index();
  return ds;
}

// JSON interchange: {"n": int, "edges": [[u, v], ...], "class": int | null}.
inline nlohmann::ordered_json graph_to_json(const Graph& g) {
  nlohmann::ordered_json j;
  j["n"] = g.node_count();
  auto edges = nlohmann::ordered_json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back({u, v});
  j["edges"] = std::move(edges);
  if (g.class_label()) {
    j["class"] = *g.class_label();
  } else {
    j["class"] = nullptr;
  }
  return j;
}

inline Graph graph_from_json(const nlohmann::json& j, std::size_t index = 0) {
  const auto fail = [&](const std::string& what) {
    return DatasetError("graph object " + std::to_string(index) + ": " + what);
  };
  if (!j.is_object()) throw fail("expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "n" && key != "edges" && key != "class") throw fail("unknown key '" + key + "'");
  }
  if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<long long>() < 0) {
    throw fail("'n' must be a non-negative integer");
  }
  const auto n = j["n"].get<std::size_t>();
  std::optional<int> label;
  if (j.contains("class") && !j["class"].is_null()) {
    if (!j["class"].is_number_integer()) throw fail("'class' must be an integer or null");
    label = j["class"].get<int>();
  }
  Graph g(n, label);
  if (!j.contains("edges") || !j["edges"].is_array()) throw fail("'edges' must be an array");
  std::size_t e = 0;
  for (const auto& pair : j["edges"]) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
        !pair[1].is_number_integer()) {
      throw fail("edge " + std::to_string(e) + " must be a pair of integers");
    }
    const long long u = pair[0].get<long long>();
    const long long v = pair[1].get<long long>();
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n) {
      throw fail("edge " + std::to_string(e) + " [" + std::to_string(u) + "," + std::to_string(v) +
                 "] out of range");
    }
    if (u == v) throw fail("edge " + std::to_string(e) + " is a self-loop");
    g.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
    ++e;
  }
  return g;
}

// One graph object per line inside a top-level array.
inline std::string serialize_graphs(const std::vector<Graph>& graphs) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    out += graph_to_json(graphs[i]).dump();
    out += (i + 1 < graphs.size()) ? ",\n" : "\n";
  }
  out += "]\n";
  return out;
}

inline std::vector<Graph> parse_graphs(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DatasetError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw DatasetError("graph file must contain a JSON array");
  std::vector<Graph> graphs;
  graphs.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) graphs.push_back(graph_from_json(doc[i], i));
  return graphs;
}

inline std::vector<Graph> load_graphs_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_graphs(buffer.str());
  } catch (const DatasetError& e) {
    throw DatasetError(path.string() + ": " + e.what());
  }
}

inline void save_graphs_json(const std::vector<Graph>& graphs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot write " + path.string());
  out << serialize_graphs(graphs);
  if (!out) throw DatasetError("write failed: " + path.string());
}

// A JSON graph file as a dataset; every graph must carry a class label.
inline Dataset load_json_dataset(const std::filesystem::path& path) {
  Dataset ds;
  ds.name = path.stem().string();
  ds.graphs = load_graphs_json(path);
  ds.rebuild_index();
  for (const auto& [label, members] : ds.class_index) ds.raw_labels[label] = label;
  return ds;
}

}  // namespace grefine
