#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gridxp/encoding.hpp"
#include "gridxp/gridworld.hpp"
#include "gridxp/object_grid.hpp"
#include "gridxp/rng.hpp"

namespace gridxp {

enum class HeadKind { kLinear, kRotational, kMirror };
enum class Representation { kAbsolute, kEgocentric };

inline int grid_side_for(Representation repr) {
  return repr == Representation::kAbsolute ? kGridSide : kEgoSide;
}

struct ModelOutput {
  std::array<double, 4> values{};  // Q-values or logits
  std::array<double, 4> probs{};   // softmax(values)
};

// Numerically stable softmax (max subtraction).
std::array<double, 4> softmax(const std::array<double, 4>& values);

// Embedding table plus one linear head, with exact hand-derived gradients.
//
// Heads:
//   kLinear      one weight per (cell, embedding dim, action)
//   kRotational  one shared kernel over the 36-cell right-pointing quadrant;
//                the grid is rotated to align each direction's quadrant with
//                the kernel, so 90-degree board rotations permute the logits
//   kMirror      one shared kernel over the 21-cell octant, applied to the
//                aligned quadrant and to its reflection about the center row
//
// Parameter layout is flat: the 5x2 embedding table first, then the head
// weights. Forward is pure; backward accumulates into a caller-owned
// gradient buffer of param_count() length.
class PolicyModel {
 public:
  PolicyModel(HeadKind head, Representation repr, Rng& rng);

  HeadKind head() const { return head_; }
  Representation representation() const { return repr_; }
  int side() const { return side_; }

  std::size_t head_param_count() const { return head_count_; }
  std::size_t param_count() const { return params_.size(); }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  ModelOutput forward(const ObjectGrid& grid) const;

  // Chain rule for d(loss)/d(values); embedding gradients accumulate over
  // every cell sharing an object index. `grad` must have param_count()
  // entries and is accumulated into, not overwritten.
  void backward(const ObjectGrid& grid, const std::array<double, 4>& dvalues,
                std::span<double> grad) const;

  // Convenience encoder matching this model's representation.
  ObjectGrid encode(const GameInstance& instance, Position agent) const;

  // Flat little-endian binary checkpoint; bit-exact round trip.
  void save(const std::string& path, std::uint64_t seed) const;
  static PolicyModel load(const std::string& path, std::uint64_t* seed_out = nullptr);

 private:
  PolicyModel() = default;
  void build_gather_tables();
  void check_grid(const ObjectGrid& grid) const;

  const double* emb() const { return params_.data(); }
  const double* head_w() const { return params_.data() + kNumObjects * kEmbeddingDim; }

  HeadKind head_ = HeadKind::kLinear;
  Representation repr_ = Representation::kAbsolute;
  int side_ = kGridSide;
  std::size_t head_count_ = 0;
  std::vector<double> params_;
  // For the symmetric heads: per direction, the original-grid cell index
  // feeding each kernel slot (and, for the mirror head, the cell feeding
  // the reflected copy).
  std::array<std::vector<int>, 4> gather_;
  std::array<std::vector<int>, 4> gather_reflected_;
};

}  // namespace gridxp
