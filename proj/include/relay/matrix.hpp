#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "relay/errors.hpp"

namespace relay {

// Dense row-major matrix of doubles. +inf is tolerated only as a penalty
// sentinel; each arithmetic entry point states what it accepts.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major, data.size() == rows * cols

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  bool same_shape(const DenseMatrix& other) const {
    return rows == other.rows && cols == other.cols;
  }
};

// "RxC", for error messages.
std::string shape_string(const DenseMatrix& m);

// Standard product a*b. Throws ShapeError when a.cols != b.rows (naming
// both operand shapes) and ValueError if either operand holds a
// non-finite entry.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix transpose(const DenseMatrix& m);

// Numerically stable per-row softmax: entry = exp(l - rowmax) / sum.
// -inf logits map to exactly 0. +inf or NaN entries are rejected with
// ValueError. A row with no finite entry raises DegenerateRowError
// carrying the row index.
DenseMatrix row_softmax(const DenseMatrix& logits);

}  // namespace relay
