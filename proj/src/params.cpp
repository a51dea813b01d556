#include "polyforge/params.hpp"

#include <cmath>
#include <stdexcept>

namespace polyforge::ad {

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Parameter& ParameterSet::declare(const std::string& name, int64_t rows, int64_t cols, Init init) {
  if (params_.count(name)) throw std::invalid_argument("parameter already declared: " + name);
  Parameter p;
  p.name = name;
  p.value = Array(rows, cols);
  p.grad = Array(rows, cols);
  Rng rng(mix_seed(seed_, fnv1a(name)));
  switch (init) {
    case Init::zeros:
      break;
    case Init::xavier: {
      const double lim = std::sqrt(6.0 / static_cast<double>(rows + cols));
      for (double& x : p.value.v) x = rng.uniform(-lim, lim);
      break;
    }
    case Init::normal_scaled: {
      const double s = 1.0 / std::sqrt(static_cast<double>(cols));
      for (double& x : p.value.v) x = rng.normal() * s;
      break;
    }
  }
  auto [it, ok] = params_.emplace(name, std::move(p));
  (void)ok;
  return it->second;
}

Parameter& ParameterSet::get(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw std::out_of_range("unknown parameter: " + name);
  return it->second;
}

const Parameter& ParameterSet::get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw std::out_of_range("unknown parameter: " + name);
  return it->second;
}

void ParameterSet::zero_grads() {
  for (auto& [_, p] : params_) std::fill(p.grad.v.begin(), p.grad.v.end(), 0.0);
}

bool ParameterSet::grads_finite() const {
  for (const auto& [_, p] : params_)
    if (!all_finite(p.grad)) return false;
  return true;
}

int64_t ParameterSet::scalar_count() const {
  int64_t n = 0;
  for (const auto& [_, p] : params_) n += p.value.numel();
  return n;
}

bool Adam::step(ParameterSet& ps, double lr_scale) {
  if (!ps.grads_finite()) {
    ++skipped_;
    return false;
  }
  ++t_;
  const double b1t = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double b2t = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const double alpha = cfg_.lr * lr_scale * std::sqrt(b2t) / b1t;
  for (auto& [name, p] : ps.items()) {
    auto it = state_.find(name);
    if (it == state_.end()) {
      it = state_.emplace(name, std::make_pair(Array(p.value.rows, p.value.cols),
                                               Array(p.value.rows, p.value.cols)))
               .first;
    }
    Array& m = it->second.first;
    Array& v = it->second.second;
    for (size_t i = 0; i < p.value.v.size(); ++i) {
      const double g = p.grad.v[i];
      m.v[i] = cfg_.beta1 * m.v[i] + (1.0 - cfg_.beta1) * g;
      v.v[i] = cfg_.beta2 * v.v[i] + (1.0 - cfg_.beta2) * g * g;
      p.value.v[i] -= alpha * m.v[i] / (std::sqrt(v.v[i]) + cfg_.eps);
    }
  }
  return true;
}

}  // namespace polyforge::ad
