#pragma once

#include <cstddef>

#include "relay/matrix.hpp"
#include "relay/penalty.hpp"

namespace relay {

// Caller-projected attention operands; `dim` is the scaling dimension d
// and must match the column counts of query and key.
struct AttentionInputs {
  DenseMatrix query;  // query_count x dim
  DenseMatrix key;    // key_count x dim
  DenseMatrix value;  // key_count x value_dim
  std::size_t dim = 0;
};

struct AttentionOutput {
  DenseMatrix output;   // query_count x value_dim
  DenseMatrix weights;  // query_count x key_count, row-stochastic
};

// weights = row_softmax(Q K^T / sqrt(d)); output = weights * V.
AttentionOutput attention(const AttentionInputs& inputs);

// weights = row_softmax(Q K^T / sqrt(d) - C). Logits paired with an
// infinite penalty are set to -inf before the softmax. With an all-zero
// penalty the result equals attention(inputs) bitwise. A query row whose
// keys are all blocked raises DegenerateRowError naming the query's
// latent frame when the penalty carries one.
AttentionOutput penalized_attention(const AttentionInputs& inputs,
                                    const PenaltyMatrix& penalty);

// Same result computed the multiplicative way: exp(logit - rowmax)
// scaled by the prior exp(-C), then normalized per row. Kept as an
// independent scalar code path so the two routes can be checked against
// each other.
AttentionOutput prior_multiplier_oracle(const AttentionInputs& inputs,
                                        const PenaltyMatrix& penalty);

}  // namespace relay
