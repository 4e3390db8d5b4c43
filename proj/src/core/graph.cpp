#include "core/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "core/error.hpp"

namespace condmean {

Graph Graph::path(std::size_t n) {
  require(n >= 1, ErrorCode::invalid_argument, "path needs at least one vertex");
  Graph g(Kind::path, 1, n);
  g.neighbors_.resize(n);
  for (std::size_t v = 0; v + 1 < n; ++v) {
    g.neighbors_[v].push_back(v + 1);
    g.neighbors_[v + 1].push_back(v);
  }
  for (auto& nb : g.neighbors_) std::sort(nb.begin(), nb.end());
  return g;
}

Graph Graph::box(int dimension, std::size_t side) {
  require(dimension >= 1 && dimension <= 8 && side >= 1,
          ErrorCode::invalid_argument, "box needs 1 <= d <= 8 and side >= 1");
  std::size_t count = 1;
  for (int k = 0; k < dimension; ++k) {
    require(count <= std::numeric_limits<std::size_t>::max() / side,
            ErrorCode::invalid_argument, "box too large");
    count *= side;
  }
  Graph g(Kind::box, dimension, side);
  g.neighbors_.resize(count);
  for (std::size_t v = 0; v < count; ++v) {
    std::size_t stride = 1;
    for (int k = 0; k < dimension; ++k) {
      const std::size_t coord = (v / stride) % side;
      if (coord + 1 < side) {
        g.neighbors_[v].push_back(v + stride);
        g.neighbors_[v + stride].push_back(v);
      }
      stride *= side;
    }
  }
  for (auto& nb : g.neighbors_) std::sort(nb.begin(), nb.end());
  return g;
}

std::string Graph::describe() const {
  if (kind_ == Kind::path) return "path(" + std::to_string(side_) + ")";
  return "box(" + std::to_string(dimension_) + "," + std::to_string(side_) + ")";
}

std::vector<std::size_t> Graph::ball(std::size_t center, std::size_t radius) const {
  require(center < vertices(), ErrorCode::invalid_argument, "ball centre out of range");
  std::vector<std::size_t> dist(vertices(), std::numeric_limits<std::size_t>::max());
  std::deque<std::size_t> queue{center};
  dist[center] = 0;
  std::vector<std::size_t> members;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    members.push_back(v);
    if (dist[v] == radius) continue;
    for (std::size_t w : neighbors_[v]) {
      if (dist[w] != std::numeric_limits<std::size_t>::max()) continue;
      dist[w] = dist[v] + 1;
      queue.push_back(w);
    }
  }
  std::sort(members.begin(), members.end());
  return members;
}

std::size_t Graph::central_vertex() const {
  const std::size_t mid = side_ / 2;
  std::size_t v = 0;
  std::size_t stride = 1;
  for (int k = 0; k < dimension_; ++k) {
    v += mid * stride;
    stride *= side_;
  }
  return v;
}

bool Graph::connected() const {
  return vertices() == 0 || ball(0, vertices()).size() == vertices();
}

bool GraphGrowth::admits(std::size_t ball_size, std::size_t radius) const {
  if (radius == 0) return ball_size <= 1;
  return static_cast<double>(ball_size) <=
         c_d * std::pow(static_cast<double>(radius), d);
}

GraphGrowth default_growth(const Graph& g) {
  return {std::pow(3.0, g.dimension()), g.dimension()};
}

}  // namespace condmean
