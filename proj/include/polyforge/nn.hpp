#pragma once

#include <string>
#include <vector>

#include "polyforge/params.hpp"
#include "polyforge/tape.hpp"

namespace polyforge::nn {

using ad::Init;
using ad::ParameterSet;
using ad::Tape;
using ad::Var;

// Linear layer: parameters "<name>.w" (in,out) and "<name>.b" (1,out).
void declare_linear(ParameterSet& ps, const std::string& name, int64_t in, int64_t out,
                    Init init = Init::xavier);
Var linear(Tape& t, ParameterSet& ps, const std::string& name, Var x);

// Two-layer MLP with SiLU: "<name>.l1", "<name>.l2".
void declare_mlp(ParameterSet& ps, const std::string& name, int64_t in, int64_t hidden,
                 int64_t out, Init last_init = Init::xavier);
Var mlp(Tape& t, ParameterSet& ps, const std::string& name, Var x);

// Multi-head self-attention over atom tokens (no positional order).
// Parameters "<name>.{wq,wk,wv,wo}". An optional additive logit bias is given
// per head as (N,N) matrices. The softmax logits are scaled by
// 1/sqrt(num_heads) when scale_by_heads is set, 1/sqrt(d_head) otherwise.
void declare_attention(ParameterSet& ps, const std::string& name, int64_t width);
Var attention(Tape& t, ParameterSet& ps, const std::string& name, Var x, int heads,
              const std::vector<Var>* bias_per_head = nullptr, bool scale_by_heads = false);

// Sinusoidal features of a scalar in [0,1]; feature_dim must be even.
ad::Array sinusoidal_features(double t, int64_t feature_dim);

// Broadcasts a (1,C) row to (rows,C) via a ones matmul.
Var broadcast_rows(Tape& t, Var row, int64_t rows);

}  // namespace polyforge::nn
