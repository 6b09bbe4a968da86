#include "relay/matrix.hpp"

#include <cmath>
#include <limits>

namespace relay {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(const DenseMatrix& m, const char* name) {
  for (double v : m.data) {
    if (!std::isfinite(v)) {
      throw ValueError(std::string("matmul: non-finite entry in operand ") +
                       name + " (" + shape_string(m) + ")");
    }
  }
}

}  // namespace

std::string shape_string(const DenseMatrix& m) {
  return std::to_string(m.rows) + "x" + std::to_string(m.cols);
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) {
    throw ShapeError("matmul: incompatible shapes " + shape_string(a) +
                     " and " + shape_string(b));
  }
  require_finite(a, "a");
  require_finite(b, "b");

  DenseMatrix out(a.rows, b.cols, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* a_row = a.data.data() + i * a.cols;
    double* out_row = out.data.data() + i * out.cols;
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double a_ik = a_row[k];
      const double* b_row = b.data.data() + k * b.cols;
      for (std::size_t j = 0; j < b.cols; ++j) {
        out_row[j] += a_ik * b_row[j];
      }
    }
  }
  return out;
}

DenseMatrix transpose(const DenseMatrix& m) {
  DenseMatrix out(m.cols, m.rows);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      out.at(c, r) = m.at(r, c);
    }
  }
  return out;
}

DenseMatrix row_softmax(const DenseMatrix& logits) {
  DenseMatrix out(logits.rows, logits.cols);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    const double* row = logits.data.data() + i * logits.cols;
    double row_max = -kInf;
    for (std::size_t j = 0; j < logits.cols; ++j) {
      const double v = row[j];
      if (std::isnan(v) || v == kInf) {
        throw ValueError("row_softmax: +inf or NaN logit at row " +
                         std::to_string(i) + ", column " + std::to_string(j));
      }
      if (v > row_max) row_max = v;
    }
    if (row_max == -kInf) {
      throw DegenerateRowError(
          "row_softmax: row " + std::to_string(i) + " has no finite logit", i);
    }

    double* out_row = out.data.data() + i * out.cols;
    double sum = 0.0;
    for (std::size_t j = 0; j < logits.cols; ++j) {
      const double e = std::exp(row[j] - row_max);  // exp(-inf) == 0 exactly
      out_row[j] = e;
      sum += e;
    }
    for (std::size_t j = 0; j < logits.cols; ++j) {
      out_row[j] /= sum;
    }
  }
  return out;
}

}  // namespace relay
