#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "flowpet/grid.hpp"

namespace flowpet {

enum class Edge : int { Left = 0, Right = 1, Bottom = 2, Top = 3 };
enum class Species : int { A = 0, T = 1, V = 2 };

inline constexpr std::array<Edge, 4> all_edges = {Edge::Left, Edge::Right,
                                                  Edge::Bottom, Edge::Top};
inline constexpr std::array<Species, 3> all_species = {Species::A, Species::T,
                                                       Species::V};

/// Flux boundary data. On inflow faces the boundary face flux is the
/// prescribed j_in (activity/(cm^2*s), >= 0, adds mass); on the remaining
/// faces mass leaves the boundary cell at speed v_out (cm/s, >= 0).
/// Edge cells are indexed by j for Left/Right and by i for Bottom/Top.
struct BoundarySpec {
  struct EdgeCondition {
    bool inflow = false;
    /// Optional per-cell inflow mask; empty means every cell of an inflow
    /// edge is inflow. Masked-out cells fall back to outflow.
    std::vector<std::uint8_t> inflow_mask;
    std::array<std::vector<double>, 3> j_in;   // per species, per edge cell
    std::array<std::vector<double>, 3> v_out;  // per species, per edge cell
  };

  std::array<EdgeCondition, 4> edges;

  EdgeCondition& edge(Edge e) { return edges[static_cast<int>(e)]; }
  const EdgeCondition& edge(Edge e) const { return edges[static_cast<int>(e)]; }

  /// All edges out-flowing with v_out = 0: zero-flux (closed) domain.
  static BoundarySpec closed() { return {}; }

  void mark_inflow(Edge e) { edge(e).inflow = true; }
  void set_uniform_j_in(const Grid& g, Edge e, Species s, double value);
  void set_uniform_v_out(const Grid& g, Edge e, Species s, double value);

  bool is_inflow_at(Edge e, int cell) const {
    const EdgeCondition& ec = edge(e);
    if (!ec.inflow) return false;
    if (ec.inflow_mask.empty()) return true;
    return ec.inflow_mask[static_cast<size_t>(cell)] != 0;
  }
  double j_in_at(Edge e, Species s, int cell) const {
    const auto& v = edge(e).j_in[static_cast<int>(s)];
    return v.empty() ? 0.0 : v[static_cast<size_t>(cell)];
  }
  double v_out_at(Edge e, Species s, int cell) const {
    const auto& v = edge(e).v_out[static_cast<int>(s)];
    return v.empty() ? 0.0 : v[static_cast<size_t>(cell)];
  }

  /// Checks array lengths against the grid and sign constraints
  /// (j_in >= 0, v_out >= 0). Throws std::invalid_argument.
  void validate(const Grid& g) const;
};

inline int edge_length(const Grid& g, Edge e) {
  return (e == Edge::Left || e == Edge::Right) ? g.ny : g.nx;
}

}  // namespace flowpet
