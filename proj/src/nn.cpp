#include "polyforge/nn.hpp"

#include <cmath>

namespace polyforge::nn {

using namespace polyforge::ad;

void declare_linear(ParameterSet& ps, const std::string& name, int64_t in, int64_t out, Init init) {
  ps.declare(name + ".w", in, out, init);
  ps.declare(name + ".b", 1, out, Init::zeros);
}

Var linear(Tape& t, ParameterSet& ps, const std::string& name, Var x) {
  Var w = t.param(ps.get(name + ".w"));
  Var b = t.param(ps.get(name + ".b"));
  return add(matmul(x, w), b);
}

void declare_mlp(ParameterSet& ps, const std::string& name, int64_t in, int64_t hidden, int64_t out,
                 Init last_init) {
  declare_linear(ps, name + ".l1", in, hidden);
  ps.declare(name + ".l2.w", hidden, out, last_init);
  ps.declare(name + ".l2.b", 1, out, Init::zeros);
}

Var mlp(Tape& t, ParameterSet& ps, const std::string& name, Var x) {
  return linear(t, ps, name + ".l2", silu(linear(t, ps, name + ".l1", x)));
}

void declare_attention(ParameterSet& ps, const std::string& name, int64_t width) {
  declare_linear(ps, name + ".wq", width, width);
  declare_linear(ps, name + ".wk", width, width);
  declare_linear(ps, name + ".wv", width, width);
  declare_linear(ps, name + ".wo", width, width);
}

Var attention(Tape& t, ParameterSet& ps, const std::string& name, Var x, int heads,
              const std::vector<Var>* bias_per_head, bool scale_by_heads) {
  const int64_t width = t.val(x).cols;
  if (width % heads != 0) throw std::invalid_argument("attention: width not divisible by heads");
  const int64_t dh = width / heads;
  const double scale =
      1.0 / std::sqrt(static_cast<double>(scale_by_heads ? heads : dh));

  Var q = linear(t, ps, name + ".wq", x);
  Var k = linear(t, ps, name + ".wk", x);
  Var v = linear(t, ps, name + ".wv", x);

  std::vector<Var> ctx;
  ctx.reserve(static_cast<size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    Var qh = slice_cols(q, h * dh, dh);
    Var kh = slice_cols(k, h * dh, dh);
    Var vh = slice_cols(v, h * dh, dh);
    Var logits = affine(matmul(qh, kh, false, true), scale, 0.0);
    if (bias_per_head) logits = add(logits, (*bias_per_head)[static_cast<size_t>(h)]);
    Var att = softmax_rows(logits);
    ctx.push_back(matmul(att, vh));
  }
  return linear(t, ps, name + ".wo", concat_cols(ctx));
}

ad::Array sinusoidal_features(double t, int64_t feature_dim) {
  if (feature_dim % 2 != 0) throw std::invalid_argument("sinusoidal feature dim must be even");
  const int64_t half = feature_dim / 2;
  ad::Array out(1, feature_dim);
  for (int64_t k = 0; k < half; ++k) {
    const double freq =
        std::exp(-std::log(10000.0) * static_cast<double>(k) / static_cast<double>(half));
    out.v[static_cast<size_t>(2 * k)] = std::sin(t * 1000.0 * freq);
    out.v[static_cast<size_t>(2 * k + 1)] = std::cos(t * 1000.0 * freq);
  }
  return out;
}

Var broadcast_rows(Tape& t, Var row, int64_t rows) {
  Var ones = t.constant(ad::Array::full(rows, 1, 1.0));
  return matmul(ones, row);
}

}  // namespace polyforge::nn
