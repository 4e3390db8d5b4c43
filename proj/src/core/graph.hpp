#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace condmean {

/// Finite connected graph with nearest-neighbour edges: a path or a box
/// (cube of side `side` in Z^d).
class Graph {
 public:
  enum class Kind { path, box };

  static Graph path(std::size_t n);
  static Graph box(int dimension, std::size_t side);

  Kind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  std::size_t side() const { return side_; }
  std::size_t vertices() const { return neighbors_.size(); }
  const std::vector<std::size_t>& neighbors(std::size_t v) const { return neighbors_[v]; }
  std::string describe() const;

  /// Vertices at graph distance <= radius from `center`, ascending.
  std::vector<std::size_t> ball(std::size_t center, std::size_t radius) const;
  /// The vertex closest to the geometric centre.
  std::size_t central_vertex() const;
  bool connected() const;

 private:
  Graph(Kind kind, int dimension, std::size_t side)
      : kind_(kind), dimension_(dimension), side_(side) {}

  Kind kind_;
  int dimension_;
  std::size_t side_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

/// Polynomial ball-growth declaration: card B_L(u) <= c_d L^d.
struct GraphGrowth {
  double c_d = 3.0;
  int d = 1;

  bool admits(std::size_t ball_size, std::size_t radius) const;
};

/// Default growth constants for the built-in graphs: (2L+1)^d <= 3^d L^d.
GraphGrowth default_growth(const Graph& g);

}  // namespace condmean
