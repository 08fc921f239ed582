#include "lpp/path.hpp"

#include "lpp/errors.hpp"

namespace lpp {

bool is_up_right(const std::vector<Vertex>& vertices) {
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    const Coord dx = vertices[i].x - vertices[i - 1].x;
    const Coord dy = vertices[i].y - vertices[i - 1].y;
    if (!((dx == 1 && dy == 0) || (dx == 0 && dy == 1))) return false;
  }
  return true;
}

double path_weight(const WeightField& field, const std::vector<Vertex>& vertices) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) total += field.weight_at(vertices[i]);
  return total;
}

std::string encode_steps(const std::vector<Vertex>& vertices) {
  if (!is_up_right(vertices)) throw ParameterError("path is not an up/right lattice path");
  std::string steps;
  steps.reserve(vertices.empty() ? 0 : vertices.size() - 1);
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    steps.push_back(vertices[i].x > vertices[i - 1].x ? 'R' : 'U');
  }
  return steps;
}

std::vector<Vertex> decode_steps(const Vertex& start, std::string_view steps) {
  std::vector<Vertex> out;
  out.reserve(steps.size() + 1);
  out.push_back(start);
  Vertex cur = start;
  for (char c : steps) {
    if (c == 'R') {
      ++cur.x;
    } else if (c == 'U') {
      ++cur.y;
    } else {
      throw ParameterError(std::string("invalid step character '") + c + "'");
    }
    out.push_back(cur);
  }
  return out;
}

Path concatenate(const Path& a, const Path& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.back() != b.front()) throw ParameterError("paths do not share a junction vertex");
  Path out;
  out.vertices.reserve(a.size() + b.size() - 1);
  out.vertices = a.vertices;
  out.vertices.insert(out.vertices.end(), b.vertices.begin() + 1, b.vertices.end());
  out.weight = a.weight + b.weight;
  return out;
}

}  // namespace lpp
