#pragma once

#include <array>
#include <utility>
#include <vector>

#include "gridxp/gridworld.hpp"
#include "gridxp/object_grid.hpp"

namespace gridxp {

// Side of the ego-centric grid: with the agent pinned to the center, the
// whole g x g board stays visible when x = 2g - 3 (the agent never occupies
// the outermost board ring).
inline constexpr int kEgoSide = 2 * kGridSide - 3;  // 11

// Index of the center cell offset (x-1)/2 for an x-sided grid.
inline constexpr int center_of(int x) { return (x - 1) / 2; }

// Trainable per-object 2-vectors feeding every head.
inline constexpr int kEmbeddingDim = 2;

struct Cell {
  int row = 0;
  int col = 0;
  auto operator<=>(const Cell&) const = default;
};

// One triangular quadrant of an x-sided grid, pointing in `direction`.
// Cells are sorted (row-major) so dot products have a fixed summation order.
struct QuadrantMask {
  Action direction = Action::kRight;
  std::vector<Cell> cells;
};

// Lower half of the right-pointing quadrant, center row included.
struct OctantMask {
  std::vector<Cell> cells;
};

// Same content as render_object_grid, exposed as the model-facing encoder.
ObjectGrid encode_absolute(const GameInstance& instance, Position agent);

// Agent-centered encoding: original cell (r, c) lands at
// (r + center - agent.row, c + center - agent.col); the agent sits at the
// center and everything outside the mapped 7x7 window is void.
ObjectGrid encode_egocentric(const GameInstance& instance, Position agent);

// Right-pointing quadrant for direction 2 is {(i, j) : j - c >= |i - c|};
// the other directions are its 90-degree rotations. The center belongs to
// all four masks, diagonal cells to exactly two.
QuadrantMask build_quadrant_mask(Action direction, int x);

// {(i, j) : j - c >= i - c >= 0}: the center row rightward down to the
// lower diagonal of the right-pointing quadrant.
OctantMask build_octant_mask(int x);

// Counter-clockwise quarter turn: out(i, j) = in(j, x-1-i). This is the
// project-wide rotation convention; it maps the quadrant for direction d
// onto the quadrant for direction (d+1) mod 4.
ObjectGrid rotate_grid_90(const ObjectGrid& grid);

// Reflection about the center row: out(i, j) = in(x-1-i, j).
ObjectGrid reflect_grid(const ObjectGrid& grid);

// Initial embedding vectors: space at the origin and the remaining objects
// on the four axis corners (+/-0.1, 0), (0, +/-0.1).
std::array<std::array<double, kEmbeddingDim>, kNumObjects> initial_embeddings();

}  // namespace gridxp
