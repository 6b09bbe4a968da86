#include "relay/attention.hpp"

#include <cmath>
#include <limits>

namespace relay {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_inputs(const AttentionInputs& in) {
  if (in.dim < 1) {
    throw ShapeError("attention: dim must be >= 1");
  }
  if (in.query.cols != in.dim || in.key.cols != in.dim) {
    throw ShapeError("attention: Q " + shape_string(in.query) + " and K " +
                     shape_string(in.key) + " must both have dim = " +
                     std::to_string(in.dim) + " columns");
  }
  if (in.key.rows != in.value.rows) {
    throw ShapeError("attention: K " + shape_string(in.key) + " and V " +
                     shape_string(in.value) + " must agree on key count");
  }
  for (const DenseMatrix* m : {&in.query, &in.key, &in.value}) {
    for (double v : m->data) {
      if (!std::isfinite(v)) {
        throw ValueError("attention: Q, K, V entries must be finite");
      }
    }
  }
}

void validate_penalty_shape(const AttentionInputs& in,
                            const PenaltyMatrix& penalty) {
  const DenseMatrix& c = penalty.values();
  if (c.rows != in.query.rows || c.cols != in.key.rows) {
    throw ShapeError("penalty shape " + shape_string(c) +
                     " does not match " + std::to_string(in.query.rows) +
                     " queries x " + std::to_string(in.key.rows) + " keys");
  }
}

DenseMatrix scaled_logits(const AttentionInputs& in) {
  DenseMatrix logits = matmul(in.query, transpose(in.key));
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(in.dim));
  for (double& v : logits.data) {
    v *= inv_sqrt_d;
  }
  return logits;
}

std::string blocked_row_message(const PenaltyMatrix& penalty,
                                std::size_t row) {
  std::string msg = "query row " + std::to_string(row);
  if (!penalty.query_frames().empty()) {
    msg += " (latent frame " +
           std::to_string(penalty.query_frames()[row]) + ")";
  }
  msg += " is fully blocked: every key carries an infinite penalty";
  return msg;
}

}  // namespace

AttentionOutput attention(const AttentionInputs& inputs) {
  validate_inputs(inputs);
  AttentionOutput out;
  out.weights = row_softmax(scaled_logits(inputs));
  out.output = matmul(out.weights, inputs.value);
  return out;
}

AttentionOutput penalized_attention(const AttentionInputs& inputs,
                                    const PenaltyMatrix& penalty) {
  validate_inputs(inputs);
  validate_penalty_shape(inputs, penalty);

  DenseMatrix logits = scaled_logits(inputs);
  const DenseMatrix& c = penalty.values();
  for (std::size_t i = 0; i < logits.rows; ++i) {
    for (std::size_t j = 0; j < logits.cols; ++j) {
      const double p = c.at(i, j);
      // Blocked pairs become -inf logits directly; subtracting inf could
      // meet an inf logit and produce NaN.
      if (p == kInf) {
        logits.at(i, j) = -kInf;
      } else {
        logits.at(i, j) -= p;
      }
    }
  }

  AttentionOutput out;
  try {
    out.weights = row_softmax(logits);
  } catch (const DegenerateRowError& e) {
    throw DegenerateRowError(blocked_row_message(penalty, e.row()), e.row());
  }
  out.output = matmul(out.weights, inputs.value);
  return out;
}

AttentionOutput prior_multiplier_oracle(const AttentionInputs& inputs,
                                        const PenaltyMatrix& penalty) {
  validate_inputs(inputs);
  validate_penalty_shape(inputs, penalty);

  const std::size_t n_query = inputs.query.rows;
  const std::size_t n_key = inputs.key.rows;
  const std::size_t value_dim = inputs.value.cols;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(inputs.dim));
  const DenseMatrix& c = penalty.values();

  AttentionOutput out;
  out.weights = DenseMatrix(n_query, n_key);
  out.output = DenseMatrix(n_query, value_dim);

  std::vector<double> scratch(n_key);
  for (std::size_t i = 0; i < n_query; ++i) {
    double row_max = -kInf;
    for (std::size_t j = 0; j < n_key; ++j) {
      double dot = 0.0;
      for (std::size_t t = 0; t < inputs.dim; ++t) {
        dot += inputs.query.at(i, t) * inputs.key.at(j, t);
      }
      scratch[j] = dot * inv_sqrt_d;
      if (scratch[j] > row_max) row_max = scratch[j];
    }

    double sum = 0.0;
    for (std::size_t j = 0; j < n_key; ++j) {
      const double prior = std::exp(-c.at(i, j));  // exp(-inf) == 0
      scratch[j] = std::exp(scratch[j] - row_max) * prior;
      sum += scratch[j];
    }
    if (!(sum > 0.0)) {
      throw DegenerateRowError(blocked_row_message(penalty, i), i);
    }

    for (std::size_t j = 0; j < n_key; ++j) {
      out.weights.at(i, j) = scratch[j] / sum;
    }
    for (std::size_t v = 0; v < value_dim; ++v) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n_key; ++j) {
        acc += out.weights.at(i, j) * inputs.value.at(j, v);
      }
      out.output.at(i, v) = acc;
    }
  }
  return out;
}

}  // namespace relay
