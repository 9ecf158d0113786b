#include "gridxp/encoding.hpp"

#include <cstdlib>
#include <stdexcept>

namespace gridxp {

ObjectGrid encode_absolute(const GameInstance& instance, Position agent) {
  return render_object_grid(instance, agent);
}

ObjectGrid encode_egocentric(const GameInstance& instance, Position agent) {
  if (!is_interior(agent)) {
    throw std::invalid_argument("encode_egocentric: agent must be interior");
  }
  const ObjectGrid board = render_object_grid(instance, agent);
  const int c = center_of(kEgoSide);
  ObjectGrid ego(kEgoSide, kVoid);
  for (int r = 0; r < kGridSide; ++r) {
    for (int col = 0; col < kGridSide; ++col) {
      ego.at(r + c - agent.row, col + c - agent.col) = board.at(r, col);
    }
  }
  return ego;
}

namespace {

void check_mask_side(int x) {
  if (x < 3 || x % 2 == 0) {
    throw std::invalid_argument("mask side must be odd and >= 3");
  }
}

}  // namespace

QuadrantMask build_quadrant_mask(Action direction, int x) {
  check_mask_side(x);
  const int c = center_of(x);
  const int d = index_of(direction);
  QuadrantMask mask;
  mask.direction = direction;
  for (int i = 0; i < x; ++i) {
    for (int j = 0; j < x; ++j) {
      // Undo d-2 quarter turns to test membership against the canonical
      // right-pointing wedge.
      int r = i, col = j;
      for (int k = 0; k < ((d - 2) % 4 + 4) % 4; ++k) {
        const int nr = col;
        const int nc = x - 1 - r;
        r = nr;
        col = nc;
      }
      if (col - c >= std::abs(r - c)) mask.cells.push_back(Cell{i, j});
    }
  }
  return mask;
}

OctantMask build_octant_mask(int x) {
  check_mask_side(x);
  const int c = center_of(x);
  OctantMask mask;
  for (int i = 0; i < x; ++i) {
    for (int j = 0; j < x; ++j) {
      if (j - c >= i - c && i - c >= 0) mask.cells.push_back(Cell{i, j});
    }
  }
  return mask;
}

ObjectGrid rotate_grid_90(const ObjectGrid& grid) {
  const int x = grid.side;
  ObjectGrid out(x, 0);
  for (int i = 0; i < x; ++i) {
    for (int j = 0; j < x; ++j) {
      out.at(i, j) = grid.at(j, x - 1 - i);
    }
  }
  return out;
}

ObjectGrid reflect_grid(const ObjectGrid& grid) {
  const int x = grid.side;
  ObjectGrid out(x, 0);
  for (int i = 0; i < x; ++i) {
    for (int j = 0; j < x; ++j) {
      out.at(i, j) = grid.at(x - 1 - i, j);
    }
  }
  return out;
}

std::array<std::array<double, kEmbeddingDim>, kNumObjects> initial_embeddings() {
  std::array<std::array<double, kEmbeddingDim>, kNumObjects> e{};
  e[kSpace] = {0.0, 0.0};
  e[kWall] = {-0.1, 0.0};
  e[kAgent] = {0.1, 0.0};
  e[kGoal] = {0.0, 0.1};
  e[kVoid] = {0.0, -0.1};
  return e;
}

}  // namespace gridxp
