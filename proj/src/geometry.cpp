#include <tube/geometry.hpp>

namespace tube {

const char* to_string(PathKind kind) {
  switch (kind) {
    case PathKind::VerticalDown: return "vertical-down";
    case PathKind::VerticalUp: return "vertical-up";
    case PathKind::Horizontal: return "horizontal";
  }
  return "unknown";
}

PathKind path_kind_from_string(const std::string& s) {
  if (s == "vertical-down") return PathKind::VerticalDown;
  if (s == "vertical-up") return PathKind::VerticalUp;
  if (s == "horizontal") return PathKind::Horizontal;
  throw DomainError("unknown boundary path kind '" + s + "'");
}

BoundaryPath::BoundaryPath(PathKind kind_, Index n_, std::vector<double> parameters_)
    : kind(kind_), n(n_), parameters(std::move(parameters_)) {
  if (n < 1) throw DomainError("BoundaryPath: n must be >= 1");
  for (std::size_t i = 0; i < parameters.size(); ++i) {
    if (!(parameters[i] > 0)) throw DomainError("BoundaryPath: parameters must be positive");
    if (i > 0 && !(parameters[i] > parameters[i - 1]))
      throw DomainError("BoundaryPath: parameters must be strictly increasing");
  }
}

BoundaryPath BoundaryPath::geometric(PathKind kind, Index n, double k_max, int count) {
  if (count < 2 || !(k_max > 1)) throw DomainError("BoundaryPath::geometric: need count >= 2, k_max > 1");
  std::vector<double> ks(count);
  for (int i = 0; i < count; ++i) ks[i] = std::pow(k_max, double(i) / (count - 1));
  ks.front() = 1.0;
  ks.back() = k_max;
  return BoundaryPath(kind, n, std::move(ks));
}

TubePointd BoundaryPath::at(std::size_t i) const {
  return boundary_sequence<double>(kind, n, parameters.at(i));
}

std::vector<BoundaryPath> standard_paths(Index n, double k_max, int count) {
  return {BoundaryPath::geometric(PathKind::VerticalDown, n, k_max, count),
          BoundaryPath::geometric(PathKind::VerticalUp, n, k_max, count),
          BoundaryPath::geometric(PathKind::Horizontal, n, k_max, count)};
}

}  // namespace tube
