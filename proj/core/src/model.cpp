#include "gridxp/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace gridxp {

std::array<double, 4> softmax(const std::array<double, 4>& values) {
  const double m = std::max(std::max(values[0], values[1]), std::max(values[2], values[3]));
  std::array<double, 4> p{};
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    p[i] = std::exp(values[i] - m);
    total += p[i];
  }
  for (int i = 0; i < 4; ++i) p[i] /= total;
  return p;
}

namespace {

// Read map of one counter-clockwise grid rotation: the rotated grid at
// (i, j) shows the original cell sigma(i, j).
inline Cell sigma(Cell c, int x) { return Cell{c.col, x - 1 - c.row}; }

// Rotations aligning direction d's quadrant with the canonical one.
inline int alignment_turns(int d) { return ((2 - d) % 4 + 4) % 4; }

inline Cell aligned_source(Cell slot, int d, int x) {
  Cell c = slot;
  for (int k = 0; k < alignment_turns(d); ++k) c = sigma(c, x);
  return c;
}

}  // namespace

PolicyModel::PolicyModel(HeadKind head, Representation repr, Rng& rng)
    : head_(head), repr_(repr), side_(grid_side_for(repr)) {
  if (head != HeadKind::kLinear && repr != Representation::kEgocentric) {
    throw std::invalid_argument("symmetric heads require the ego-centric representation");
  }
  switch (head) {
    case HeadKind::kLinear:
      head_count_ = static_cast<std::size_t>(side_) * side_ * kEmbeddingDim * 4;
      break;
    case HeadKind::kRotational:
      head_count_ = build_quadrant_mask(Action::kRight, side_).cells.size() * kEmbeddingDim;
      break;
    case HeadKind::kMirror:
      head_count_ = build_octant_mask(side_).cells.size() * kEmbeddingDim;
      break;
  }
  // Pin the published sizes for the validated geometry.
  if (head == HeadKind::kLinear && repr == Representation::kAbsolute && head_count_ != 392) {
    throw std::logic_error("linear absolute head must have 392 weights");
  }
  if (head == HeadKind::kLinear && repr == Representation::kEgocentric && head_count_ != 968) {
    throw std::logic_error("linear ego head must have 968 weights");
  }
  if (head == HeadKind::kRotational && head_count_ != 72) {
    throw std::logic_error("rotational head must have 72 weights");
  }
  if (head == HeadKind::kMirror && head_count_ != 42) {
    throw std::logic_error("mirror head must have 42 weights");
  }

  params_.resize(kNumObjects * kEmbeddingDim + head_count_);
  const auto e = initial_embeddings();
  for (int o = 0; o < kNumObjects; ++o) {
    for (int dim = 0; dim < kEmbeddingDim; ++dim) {
      params_[o * kEmbeddingDim + dim] = e[o][dim];
    }
  }
  for (std::size_t i = 0; i < head_count_; ++i) {
    params_[kNumObjects * kEmbeddingDim + i] = rng.uniform_real(-0.05, 0.05);
  }
  build_gather_tables();
}

void PolicyModel::build_gather_tables() {
  if (head_ == HeadKind::kLinear) return;
  const int x = side_;
  const std::vector<Cell> slots = head_ == HeadKind::kRotational
                                      ? build_quadrant_mask(Action::kRight, x).cells
                                      : build_octant_mask(x).cells;
  for (int d = 0; d < 4; ++d) {
    gather_[d].reserve(slots.size());
    for (const Cell slot : slots) {
      const Cell s = aligned_source(slot, d, x);
      gather_[d].push_back(s.row * x + s.col);
    }
    if (head_ == HeadKind::kMirror) {
      gather_reflected_[d].reserve(slots.size());
      for (const Cell slot : slots) {
        const Cell s = aligned_source(Cell{x - 1 - slot.row, slot.col}, d, x);
        gather_reflected_[d].push_back(s.row * x + s.col);
      }
    }
  }
}

void PolicyModel::check_grid(const ObjectGrid& grid) const {
  if (grid.side != side_ || grid.cells.size() != static_cast<std::size_t>(side_) * side_) {
    throw std::invalid_argument("grid shape does not match model");
  }
}

ModelOutput PolicyModel::forward(const ObjectGrid& grid) const {
  check_grid(grid);
  ModelOutput out;
  const double* e = emb();
  const double* w = head_w();
  if (head_ == HeadKind::kLinear) {
    const std::size_t n = grid.cells.size();
    for (std::size_t cell = 0; cell < n; ++cell) {
      const double* ev = e + grid.cells[cell] * kEmbeddingDim;
      const double* wc = w + cell * kEmbeddingDim * 4;
      for (int dim = 0; dim < kEmbeddingDim; ++dim) {
        const double v = ev[dim];
        for (int a = 0; a < 4; ++a) out.values[a] += v * wc[dim * 4 + a];
      }
    }
  } else {
    const std::size_t n_slots = head_count_ / kEmbeddingDim;
    for (int d = 0; d < 4; ++d) {
      double acc = 0.0;
      const int* src = gather_[d].data();
      for (std::size_t s = 0; s < n_slots; ++s) {
        const double* ev = e + grid.cells[src[s]] * kEmbeddingDim;
        acc += w[s * 2] * ev[0] + w[s * 2 + 1] * ev[1];
      }
      if (head_ == HeadKind::kMirror) {
        const int* srcr = gather_reflected_[d].data();
        for (std::size_t s = 0; s < n_slots; ++s) {
          const double* ev = e + grid.cells[srcr[s]] * kEmbeddingDim;
          acc += w[s * 2] * ev[0] + w[s * 2 + 1] * ev[1];
        }
      }
      out.values[d] = acc;
    }
  }
  out.probs = softmax(out.values);
  return out;
}

void PolicyModel::backward(const ObjectGrid& grid, const std::array<double, 4>& dvalues,
                           std::span<double> grad) const {
  check_grid(grid);
  if (grad.size() != params_.size()) {
    throw std::invalid_argument("gradient buffer does not match model");
  }
  const double* e = emb();
  const double* w = head_w();
  double* gemb = grad.data();
  double* ghead = grad.data() + kNumObjects * kEmbeddingDim;
  if (head_ == HeadKind::kLinear) {
    const std::size_t n = grid.cells.size();
    for (std::size_t cell = 0; cell < n; ++cell) {
      const int obj = grid.cells[cell];
      const double* ev = e + obj * kEmbeddingDim;
      const double* wc = w + cell * kEmbeddingDim * 4;
      double* gwc = ghead + cell * kEmbeddingDim * 4;
      for (int dim = 0; dim < kEmbeddingDim; ++dim) {
        double din = 0.0;
        for (int a = 0; a < 4; ++a) {
          gwc[dim * 4 + a] += ev[dim] * dvalues[a];
          din += wc[dim * 4 + a] * dvalues[a];
        }
        gemb[obj * kEmbeddingDim + dim] += din;
      }
    }
  } else {
    const std::size_t n_slots = head_count_ / kEmbeddingDim;
    for (int d = 0; d < 4; ++d) {
      const double dv = dvalues[d];
      if (dv == 0.0) continue;
      const int* src = gather_[d].data();
      for (std::size_t s = 0; s < n_slots; ++s) {
        const int obj = grid.cells[src[s]];
        const double* ev = e + obj * kEmbeddingDim;
        ghead[s * 2] += dv * ev[0];
        ghead[s * 2 + 1] += dv * ev[1];
        gemb[obj * kEmbeddingDim] += dv * w[s * 2];
        gemb[obj * kEmbeddingDim + 1] += dv * w[s * 2 + 1];
      }
      if (head_ == HeadKind::kMirror) {
        const int* srcr = gather_reflected_[d].data();
        for (std::size_t s = 0; s < n_slots; ++s) {
          const int obj = grid.cells[srcr[s]];
          const double* ev = e + obj * kEmbeddingDim;
          ghead[s * 2] += dv * ev[0];
          ghead[s * 2 + 1] += dv * ev[1];
          gemb[obj * kEmbeddingDim] += dv * w[s * 2];
          gemb[obj * kEmbeddingDim + 1] += dv * w[s * 2 + 1];
        }
      }
    }
  }
}

ObjectGrid PolicyModel::encode(const GameInstance& instance, Position agent) const {
  return repr_ == Representation::kAbsolute ? encode_absolute(instance, agent)
                                            : encode_egocentric(instance, agent);
}

namespace {

constexpr char kMagic[8] = {'G', 'X', 'P', 'M', 'O', 'D', 'L', '1'};

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void PolicyModel::save(const std::string& path, std::uint64_t seed) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  os.write(kMagic, sizeof(kMagic));
  write_pod(os, static_cast<std::uint8_t>(head_));
  write_pod(os, static_cast<std::uint8_t>(repr_));
  write_pod(os, static_cast<std::int32_t>(kGridSide));
  write_pod(os, static_cast<std::int32_t>(side_));
  write_pod(os, seed);
  write_pod(os, static_cast<std::uint64_t>(params_.size()));
  os.write(reinterpret_cast<const char*>(params_.data()),
           static_cast<std::streamsize>(params_.size() * sizeof(double)));
  if (!os) throw std::runtime_error("checkpoint write failed: " + path);
}

PolicyModel PolicyModel::load(const std::string& path, std::uint64_t* seed_out) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a model checkpoint: " + path);
  }
  std::uint8_t head_u8 = 0, repr_u8 = 0;
  std::int32_t g = 0, x = 0;
  std::uint64_t seed = 0, count = 0;
  read_pod(is, head_u8);
  read_pod(is, repr_u8);
  read_pod(is, g);
  read_pod(is, x);
  read_pod(is, seed);
  read_pod(is, count);
  if (!is || g != kGridSide || head_u8 > 2 || repr_u8 > 1) {
    throw std::runtime_error("corrupt checkpoint header: " + path);
  }
  PolicyModel model;
  model.head_ = static_cast<HeadKind>(head_u8);
  model.repr_ = static_cast<Representation>(repr_u8);
  model.side_ = grid_side_for(model.repr_);
  if (x != model.side_) throw std::runtime_error("checkpoint grid side mismatch: " + path);
  switch (model.head_) {
    case HeadKind::kLinear:
      model.head_count_ = static_cast<std::size_t>(x) * x * kEmbeddingDim * 4;
      break;
    case HeadKind::kRotational:
      model.head_count_ = 72;
      break;
    case HeadKind::kMirror:
      model.head_count_ = 42;
      break;
  }
  if (count != kNumObjects * kEmbeddingDim + model.head_count_) {
    throw std::runtime_error("checkpoint parameter count mismatch: " + path);
  }
  model.params_.resize(count);
  is.read(reinterpret_cast<char*>(model.params_.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!is) throw std::runtime_error("truncated checkpoint: " + path);
  model.build_gather_tables();
  if (seed_out) *seed_out = seed;
  return model;
}

}  // namespace gridxp
