#include "chaoslab/graph.hpp"

#include <algorithm>
#include <istream>
#include <set>
#include <sstream>

#include "chaoslab/errors.hpp"

namespace chaoslab {

Graph::Graph(int n_vertices, std::vector<std::pair<int, int>> edges)
    : n_(n_vertices), incident_(static_cast<std::size_t>(std::max(n_vertices, 0))) {
  if (n_vertices < 1) throw invalid_parameter("Graph: need at least one vertex");
  std::set<std::pair<int, int>> seen;
  edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n_ || b >= n_) throw invalid_parameter("Graph: edge endpoint out of range");
    if (a == b) throw invalid_parameter("Graph: self-loop at vertex " + std::to_string(a));
    if (a > b) std::swap(a, b);
    if (!seen.emplace(a, b).second) {
      throw invalid_parameter("Graph: duplicate edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
    }
    const int e = static_cast<int>(edges_.size());
    edges_.emplace_back(a, b);
    incident_[static_cast<std::size_t>(a)].push_back(e);
    incident_[static_cast<std::size_t>(b)].push_back(e);
  }
  for (const auto& inc : incident_) max_degree_ = std::max(max_degree_, static_cast<int>(inc.size()));
}

Graph Graph::complete(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  }
  return Graph(n, std::move(edges));
}

Graph Graph::cycle(int n) {
  if (n < 3) throw invalid_parameter("Graph::cycle: need at least 3 vertices");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return Graph(n, std::move(edges));
}

Graph Graph::torus(int rows, int cols) {
  if (rows < 3 || cols < 3) throw invalid_parameter("Graph::torus: each side must be >= 3");
  std::vector<std::pair<int, int>> edges;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      edges.emplace_back(id(r, c), id(r, (c + 1) % cols));
      edges.emplace_back(id(r, c), id((r + 1) % rows, c));
    }
  }
  return Graph(rows * cols, std::move(edges));
}

Graph parse_edge_list(std::istream& in) {
  std::ostringstream cleaned;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    cleaned << line << '\n';
  }
  std::istringstream tokens(cleaned.str());
  int n = 0;
  if (!(tokens >> n)) throw invalid_parameter("parse_edge_list: missing vertex count");
  std::vector<std::pair<int, int>> edges;
  int a = 0;
  int b = 0;
  while (tokens >> a) {
    if (!(tokens >> b)) throw invalid_parameter("parse_edge_list: dangling vertex without a partner");
    edges.emplace_back(a, b);
  }
  if (!tokens.eof()) throw invalid_parameter("parse_edge_list: non-integer token");
  return Graph(n, std::move(edges));
}

Graph graph_from_json(const nlohmann::json& j) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw invalid_parameter("graph_from_json: each edge must be a pair");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return Graph(j.at("vertices").get<int>(), std::move(edges));
}

nlohmann::json to_json(const Graph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (auto [a, b] : g.edges()) edges.push_back({a, b});
  return {{"vertices", g.n_vertices()}, {"edges", edges}, {"max_degree", g.max_degree()}};
}

}  // namespace chaoslab
