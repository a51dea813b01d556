#pragma once

#include "polyforge/chemgraph.hpp"
#include "polyforge/nn.hpp"

namespace polyforge {

struct ConditionerConfig {
  int64_t width = 256;
  int64_t out_dim = 256;  // dimension of the atom-wise conditioning C_i
};

// Graph interaction network producing the atom-wise conditioning C_i used by
// the encoder, decoder and denoiser. Four message-passing layers with
// residual edge/node updates, then global sum pooling concatenated back per
// atom. Connectivity only; image shifts do not enter the computation beyond
// selecting the periodic bond-type token.
class Conditioner {
 public:
  static constexpr int kLayers = 4;
  // bond-type vocabulary: single, double, triple, aromatic, periodic closure
  static constexpr int kBondVocab = 5;

  explicit Conditioner(ConditionerConfig cfg) : cfg_(cfg) {}

  void declare(ad::ParameterSet& ps) const;

  struct Output {
    nn::Var c;        // (N, out_dim) conditioning vectors
    nn::Var h_final;  // (N, width) per-atom features before global pooling
  };

  Output forward(ad::Tape& t, ad::ParameterSet& ps, const MolecularGraph& g,
                 const PositionalEncodings& pe) const;

  const ConditionerConfig& config() const { return cfg_; }

 private:
  ConditionerConfig cfg_;
};

}  // namespace polyforge
