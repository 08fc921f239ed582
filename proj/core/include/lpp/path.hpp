#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lpp/field.hpp"
#include "lpp/lattice.hpp"

namespace lpp {

/// Up/right lattice path. `weight` follows the endpoint-exclusive convention:
/// the sum of the weights of every vertex except the last, so that weights
/// add under concatenation.
struct Path {
  std::vector<Vertex> vertices;
  double weight = 0.0;

  bool empty() const { return vertices.empty(); }
  std::size_t size() const { return vertices.size(); }
  const Vertex& front() const { return vertices.front(); }
  const Vertex& back() const { return vertices.back(); }

  friend bool operator==(const Path&, const Path&) = default;
};

/// True when consecutive vertices differ by exactly (1,0) or (0,1).
bool is_up_right(const std::vector<Vertex>& vertices);

/// Endpoint-exclusive weight of a vertex list, summed from the first vertex.
double path_weight(const WeightField& field, const std::vector<Vertex>& vertices);

/// Run-length-free step encoding: 'R' for (1,0), 'U' for (0,1).
std::string encode_steps(const std::vector<Vertex>& vertices);
std::vector<Vertex> decode_steps(const Vertex& start, std::string_view steps);

/// Concatenates two paths sharing a junction vertex (a.back() == b.front()).
Path concatenate(const Path& a, const Path& b);

}  // namespace lpp
