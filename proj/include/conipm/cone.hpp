#pragma once

#include <stdexcept>
#include <vector>

#include "conipm/linalg.hpp"

namespace conipm {

enum class BlockType {
  Orthant,      // x_i >= 0 componentwise
  SecondOrder,  // x = (x0, xbar) with x0 >= ||xbar||
};

struct ConeBlock {
  BlockType type;
  int dim;
};

// Proper cone given as an ordered product of orthant and second-order blocks.
struct ConeSpec {
  std::vector<ConeBlock> blocks;

  int dim() const {
    int n = 0;
    for (const auto& b : blocks) n += b.dim;
    return n;
  }

  // Barrier parameter: n per orthant block, 2 per second-order block.
  double barrier_parameter() const {
    double nu = 0.0;
    for (const auto& b : blocks) {
      nu += b.type == BlockType::Orthant ? static_cast<double>(b.dim) : 2.0;
    }
    return nu;
  }

  // e for orthant blocks, (1, 0, ..., 0) for second-order blocks.
  Vector canonical_interior_point() const {
    Vector x = Vector::Zero(dim());
    int off = 0;
    for (const auto& b : blocks) {
      if (b.type == BlockType::Orthant) {
        x.segment(off, b.dim).setOnes();
      } else {
        x(off) = 1.0;
      }
      off += b.dim;
    }
    return x;
  }

  void check_valid() const {
    if (blocks.empty()) throw std::invalid_argument("cone must have at least one block");
    for (const auto& b : blocks) {
      if (b.dim < 1) throw std::invalid_argument("cone block dimension must be >= 1");
      if (b.type == BlockType::SecondOrder && b.dim < 2) {
        throw std::invalid_argument("second-order block dimension must be >= 2");
      }
    }
  }
};

}  // namespace conipm
