#pragma once

#include "polyforge/geometry.hpp"
#include "polyforge/nn.hpp"
#include "polyforge/records.hpp"
#include "polyforge/rng.hpp"

namespace polyforge {

struct VaeConfig {
  int64_t latent_dim = 8;
  int64_t width = 256;
  int blocks = 4;  // per transformer (encoder and decoder each)
  int heads = 8;
};

struct LossWeights {
  double bbox = 1.0;
  double frac = 10.0;
  double pos = 1.0;
  double kl = 1e-5;
  double bond = 1.0;
  double angle = 0.1;
  double dihedral = 0.01;
};

// Atom-token transformer VAE over [fractional coords; scaled Cartesian
// coords; periodicity flag] + conditioning. Molecules enter with a zeroed
// fractional channel; their bbox/frac heads are produced but unused.
class Vae {
 public:
  Vae(VaeConfig cfg, int64_t cond_dim) : cfg_(cfg), cond_dim_(cond_dim) {}

  void declare(ad::ParameterSet& ps) const;

  struct EncodeOut {
    nn::Var mu;         // (N, d)
    nn::Var sigma;      // (N, d), positive via exp
    nn::Var log_sigma;  // (N, d)
  };
  EncodeOut encode(ad::Tape& t, ad::ParameterSet& ps, const Structure& s, nn::Var c) const;

  static nn::Var reparameterize(ad::Tape& t, nn::Var mu, nn::Var sigma, Rng& rng);

  struct DecodeOut {
    nn::Var frac;     // (N, 3), unconstrained; wrapped only at realization
    nn::Var pos_ang;  // (N, 3), Angstrom
    nn::Var bz_norm;  // (1, 1), normalized by 10 * cbrt(N)
  };
  DecodeOut decode(ad::Tape& t, ad::ParameterSet& ps, nn::Var z, nn::Var c) const;

  struct LossTerms {
    nn::Var total, bbox, frac, pos, kl, bond, angle, dihedral;
  };
  // Reconstruction + KL + internal-coordinate losses against the target
  // system. Angle and dihedral terms are computed in radians; the dihedral
  // difference is wrapped periodically.
  LossTerms loss(ad::Tape& t, const System& target, const InternalCoordinateSet& ics,
                 const EncodeOut& enc, const DecodeOut& dec, const LossWeights& w) const;

  const VaeConfig& config() const { return cfg_; }
  int64_t cond_dim() const { return cond_dim_; }

  // Cartesian scale for non-periodic inputs ("scaled p_i"): fixed 10 A.
  static constexpr double kMoleculeScale = 10.0;

 private:
  VaeConfig cfg_;
  int64_t cond_dim_;
};

// Maps decoder outputs to coordinates: periodic systems realize Cartesian
// positions from wrapped fractional z and b_z = bz_norm * 10 * cbrt(N);
// molecules take the Cartesian head directly.
Structure realize_structure(const ad::Array& frac, const ad::Array& pos_ang, double bz_norm,
                            bool periodic);

double unnormalize_bz(double bz_norm, int atom_count);
double normalize_bz(double bz_ang, int atom_count);

struct ReconstructionMetrics {
  double bond_rmse = 0.0;    // Angstrom
  double bz_rel_err = 0.0;   // |pred-true|/true, 0 for molecules
};
ReconstructionMetrics reconstruction_metrics(const System& target, const Structure& predicted);

}  // namespace polyforge
