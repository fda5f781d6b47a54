#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace chaoslab {

// Simple undirected graph: no self-loops, no duplicate edges. Edges are
// stored with first < second in insertion order.
class Graph {
 public:
  Graph(int n_vertices, std::vector<std::pair<int, int>> edges);

  static Graph complete(int n);
  static Graph cycle(int n);
  // rows x cols grid with periodic boundaries in both directions.
  static Graph torus(int rows, int cols);

  int n_vertices() const { return n_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  std::size_t n_edges() const { return edges_.size(); }
  int max_degree() const { return max_degree_; }
  // Edge indices incident to vertex v.
  const std::vector<int>& incident(int v) const { return incident_[static_cast<std::size_t>(v)]; }

 private:
  int n_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> incident_;
  int max_degree_ = 0;
};

// Text format: first token is the vertex count, followed by whitespace
// separated vertex pairs. '#' starts a comment running to end of line.
Graph parse_edge_list(std::istream& in);
Graph graph_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Graph& g);

}  // namespace chaoslab
