#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "polyforge/rng.hpp"
#include "polyforge/tape.hpp"

namespace polyforge::ad {

enum class Init { zeros, xavier, normal_scaled };

// Named parameter registry with deterministic, order-independent
// initialization: each parameter is seeded from (set seed, name), so the
// same names and seed always produce the same values regardless of the
// order in which modules declare them.
class ParameterSet {
 public:
  explicit ParameterSet(uint64_t seed = 0) : seed_(seed) {}

  Parameter& declare(const std::string& name, int64_t rows, int64_t cols,
                     Init init = Init::xavier);
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  bool contains(const std::string& name) const { return params_.count(name) != 0; }

  void zero_grads();
  bool grads_finite() const;
  size_t count() const { return params_.size(); }
  int64_t scalar_count() const;

  std::map<std::string, Parameter>& items() { return params_; }
  const std::map<std::string, Parameter>& items() const { return params_; }

  uint64_t seed() const { return seed_; }

 private:
  std::map<std::string, Parameter> params_;
  uint64_t seed_;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction folded into the step size:
//   alpha_t = lr * sqrt(1 - beta2^t) / (1 - beta1^t)
//   theta  -= alpha_t * m / (sqrt(v) + eps)
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  // Applies one update over every parameter in the set. If any gradient is
  // non-finite the whole step is skipped and false is returned.
  bool step(ParameterSet& ps, double lr_scale = 1.0);

  int64_t steps_taken() const { return t_; }
  int64_t skipped() const { return skipped_; }
  const AdamConfig& config() const { return cfg_; }

  // Moment buffers keyed by parameter name, exposed for checkpointing.
  std::map<std::string, std::pair<Array, Array>>& state() { return state_; }
  void set_steps_taken(int64_t t) { t_ = t; }

 private:
  AdamConfig cfg_;
  int64_t t_ = 0;
  int64_t skipped_ = 0;
  std::map<std::string, std::pair<Array, Array>> state_;
};

}  // namespace polyforge::ad
