#pragma once

#include <cstdint>
#include <vector>

namespace gridxp {

// Object vocabulary for grid cells. `Void` marks ego-centric padding
// outside the mapped board window; it never appears in absolute grids.
enum Object : std::uint8_t {
  kSpace = 0,
  kWall = 1,
  kAgent = 2,
  kGoal = 3,
  kVoid = 4,
};
inline constexpr int kNumObjects = 5;

// Square grid of object indices, row-major.
struct ObjectGrid {
  int side = 0;
  std::vector<std::uint8_t> cells;

  ObjectGrid() = default;
  ObjectGrid(int s, std::uint8_t fill) : side(s), cells(static_cast<std::size_t>(s) * s, fill) {}

  std::uint8_t& at(int row, int col) { return cells[static_cast<std::size_t>(row) * side + col]; }
  std::uint8_t at(int row, int col) const { return cells[static_cast<std::size_t>(row) * side + col]; }

  bool operator==(const ObjectGrid&) const = default;
};

}  // namespace gridxp
