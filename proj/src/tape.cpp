#include "polyforge/tape.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace polyforge::ad {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EMap = Eigen::Map<EMat>;
using ECMap = Eigen::Map<const EMat>;

ECMap emap(const Array& a) { return ECMap(a.v.data(), a.rows, a.cols); }
EMap emap(Array& a) { return EMap(a.v.data(), a.rows, a.cols); }

[[noreturn]] void shape_error(const char* op, const Array& a, const Array& b) {
  throw std::invalid_argument(std::string(op) + ": incompatible shapes " + a.shape_str() +
                              " and " + b.shape_str());
}

[[noreturn]] void shape_error(const char* op, const Array& a) {
  throw std::invalid_argument(std::string(op) + ": bad shape " + a.shape_str());
}

enum class Bcast { full, scalar, row, col };

Bcast bcast_kind(const char* op, const Array& a, const Array& b) {
  if (a.same_shape(b)) return Bcast::full;
  if (b.is_scalar()) return Bcast::scalar;
  if (b.rows == 1 && b.cols == a.cols) return Bcast::row;
  if (b.cols == 1 && b.rows == a.rows) return Bcast::col;
  shape_error(op, a, b);
}

double bval(const Array& b, Bcast k, int64_t r, int64_t c) {
  switch (k) {
    case Bcast::full: return b.at(r, c);
    case Bcast::scalar: return b.v[0];
    case Bcast::row: return b.at(0, c);
    case Bcast::col: return b.at(r, 0);
  }
  return 0.0;
}

// Accumulate g (shaped like the full operand) into the broadcast operand's
// gradient, reducing over broadcast dimensions.
void accum_bcast(Array& dst, const Array& g, Bcast k) {
  switch (k) {
    case Bcast::full:
      for (size_t i = 0; i < g.v.size(); ++i) dst.v[i] += g.v[i];
      break;
    case Bcast::scalar: {
      double s = 0.0;
      for (double x : g.v) s += x;
      dst.v[0] += s;
      break;
    }
    case Bcast::row:
      for (int64_t r = 0; r < g.rows; ++r)
        for (int64_t c = 0; c < g.cols; ++c) dst.v[static_cast<size_t>(c)] += g.at(r, c);
      break;
    case Bcast::col:
      for (int64_t r = 0; r < g.rows; ++r)
        for (int64_t c = 0; c < g.cols; ++c) dst.v[static_cast<size_t>(r)] += g.at(r, c);
      break;
  }
}

Tape& tape_of(Var a) {
  if (a.tape == nullptr || a.id < 0) throw std::invalid_argument("unbound Var");
  return *a.tape;
}

void check_same_tape(Var a, Var b) {
  if (a.tape != b.tape) throw std::invalid_argument("Vars belong to different tapes");
}

}  // namespace

bool all_finite(const Array& a) {
  for (double x : a.v)
    if (!std::isfinite(x)) return false;
  return true;
}

struct NodeAccess {
  static Var push(Tape& t, Array val, std::function<void(Tape&, int)> back) {
    Tape::Node n;
    n.val = std::move(val);
    if (t.recording()) n.back = std::move(back);
    t.nodes_.push_back(std::move(n));
    return Var{&t, static_cast<int>(t.nodes_.size()) - 1};
  }
  static std::vector<Tape::Node>& nodes(Tape& t) { return t.nodes_; }
};

Var make_node(Tape& t, Array val, std::function<void(Tape&, int)> back) {
  return NodeAccess::push(t, std::move(val), std::move(back));
}

Var Tape::constant(Array a) { return NodeAccess::push(*this, std::move(a), nullptr); }

Var Tape::param(Parameter& p) {
  Parameter* pp = &p;
  return NodeAccess::push(*this, p.value, [pp](Tape& t, int self) {
    const Array& g = t.grad_of(self);
    if (pp->grad.v.size() != g.v.size()) pp->grad = Array(g.rows, g.cols);
    for (size_t i = 0; i < g.v.size(); ++i) pp->grad.v[i] += g.v[i];
  });
}

void Tape::backward(Var loss) {
  if (!recording_) throw std::logic_error("backward on a non-recording tape");
  if (loss.tape != this) throw std::invalid_argument("loss from another tape");
  const Array& lv = nodes_[static_cast<size_t>(loss.id)].val;
  if (!lv.is_scalar()) throw std::invalid_argument("backward: loss must be scalar, got " + lv.shape_str());

  for (int i = 0; i <= loss.id; ++i) {
    Node& n = nodes_[static_cast<size_t>(i)];
    n.grad = Array(n.val.rows, n.val.cols);
  }
  nodes_[static_cast<size_t>(loss.id)].grad.v[0] = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<size_t>(i)];
    if (n.back) n.back(*this, i);
  }
}

void Tape::reset() { nodes_.clear(); }

// ---- elementwise binaries --------------------------------------------------

namespace {

template <typename FwdFn, typename BackFn>
Var ew_binary(const char* name, Var a, Var b, FwdFn fwd, BackFn back) {
  check_same_tape(a, b);
  Tape& t = tape_of(a);
  const Array& av = t.val(a);
  const Array& bv = t.val(b);
  const Bcast k = bcast_kind(name, av, bv);
  Array out(av.rows, av.cols);
  for (int64_t r = 0; r < av.rows; ++r)
    for (int64_t c = 0; c < av.cols; ++c) out.at(r, c) = fwd(av.at(r, c), bval(bv, k, r, c));
  const int ai = a.id, bi = b.id;
  return make_node(t, std::move(out), [ai, bi, k, back](Tape& t, int self) {
    const Array& g = t.grad_of(self);
    const Array& av = t.val_of(ai);
    const Array& bv = t.val_of(bi);
    Array ga(g.rows, g.cols);
    Array gb(g.rows, g.cols);
    for (int64_t r = 0; r < g.rows; ++r)
      for (int64_t c = 0; c < g.cols; ++c) {
        double da, db;
        back(av.at(r, c), bval(bv, k, r, c), da, db);
        ga.at(r, c) = g.at(r, c) * da;
        gb.at(r, c) = g.at(r, c) * db;
      }
    accum_bcast(t.grad_of(ai), ga, Bcast::full);
    accum_bcast(t.grad_of(bi), gb, k);
  });
}

template <typename FwdFn, typename DerivFn>
Var ew_unary(Var a, FwdFn fwd, DerivFn deriv) {
  Tape& t = tape_of(a);
  const Array& av = t.val(a);
  Array out(av.rows, av.cols);
  for (size_t i = 0; i < av.v.size(); ++i) out.v[i] = fwd(av.v[i]);
  const int ai = a.id;
  return make_node(t, std::move(out), [ai, deriv](Tape& t, int self) {
    const Array& g = t.grad_of(self);
    const Array& av = t.val_of(ai);
    const Array& ov = t.val_of(self);
    Array& ga = t.grad_of(ai);
    for (size_t i = 0; i < g.v.size(); ++i) ga.v[i] += g.v[i] * deriv(av.v[i], ov.v[i]);
  });
}

}  // namespace

Var add(Var a, Var b) {
  return ew_binary(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double, double, double& da, double& db) { da = 1.0; db = 1.0; });
}

Var sub(Var a, Var b) {
  return ew_binary(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double, double, double& da, double& db) { da = 1.0; db = -1.0; });
}

Var mul(Var a, Var b) {
  return ew_binary(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](double x, double y, double& da, double& db) { da = y; db = x; });
}

Var div(Var a, Var b) {
  return ew_binary(
      "div", a, b, [](double x, double y) { return x / y; },
      [](double x, double y, double& da, double& db) {
        da = 1.0 / y;
        db = -x / (y * y);
      });
}

Var neg(Var a) { return affine(a, -1.0, 0.0); }

Var affine(Var a, double k, double b) {
  return ew_unary(
      a, [k, b](double x) { return k * x + b; }, [k](double, double) { return k; });
}

// ---- matmul ---------------------------------------------------------------

namespace {

Array matmul_vals(const Array& a, const Array& b, bool ta, bool tb) {
  const int64_t ar = ta ? a.cols : a.rows;
  const int64_t ac = ta ? a.rows : a.cols;
  const int64_t br = tb ? b.cols : b.rows;
  const int64_t bc = tb ? b.rows : b.cols;
  if (ac != br) shape_error("matmul", a, b);
  Array out(ar, bc);
  auto am = emap(a);
  auto bm = emap(b);
  auto om = emap(out);
  if (!ta && !tb)
    om.noalias() = am * bm;
  else if (ta && !tb)
    om.noalias() = am.transpose() * bm;
  else if (!ta && tb)
    om.noalias() = am * bm.transpose();
  else
    om.noalias() = am.transpose() * bm.transpose();
  return out;
}

void matmul_accum(Array& dst, const Array& a, const Array& b, bool ta, bool tb) {
  auto dm = emap(dst);
  auto am = emap(a);
  auto bm = emap(b);
  if (!ta && !tb)
    dm.noalias() += am * bm;
  else if (ta && !tb)
    dm.noalias() += am.transpose() * bm;
  else if (!ta && tb)
    dm.noalias() += am * bm.transpose();
  else
    dm.noalias() += am.transpose() * bm.transpose();
}

}  // namespace

Var matmul(Var a, Var b, bool trans_a, bool trans_b) {
  check_same_tape(a, b);
  Tape& t = tape_of(a);
  Array out = matmul_vals(t.val(a), t.val(b), trans_a, trans_b);
  const int ai = a.id, bi = b.id;
  return make_node(t, std::move(out), [ai, bi, trans_a, trans_b](Tape& t, int self) {
    const Array& g = t.grad_of(self);
    const Array& av = t.val_of(ai);
    const Array& bv = t.val_of(bi);
    // C = op(A) op(B): dA accumulates g (x) B, dB accumulates A (x) g with
    // transposes matching each of the four flag combinations.
    if (!trans_a) {
      matmul_accum(t.grad_of(ai), g, bv, false, !trans_b);
    } else {
      matmul_accum(t.grad_of(ai), bv, g, trans_b, true);
    }
    if (!trans_b) {
      matmul_accum(t.grad_of(bi), av, g, !trans_a, false);
    } else {
      matmul_accum(t.grad_of(bi), g, av, true, trans_a);
    }
  });
}

// ---- structural ops ---------------------------------------------------------

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: empty input");
  Tape& t = tape_of(parts[0]);
  const int64_t rows = t.val(parts[0]).rows;
  int64_t cols = 0;
  for (Var p : parts) {
    check_same_tape(parts[0], p);
    if (t.val(p).rows != rows) shape_error("concat_cols", t.val(parts[0]), t.val(p));
    cols += t.val(p).cols;
  }
  Array out(rows, cols);
  int64_t off = 0;
  std::vector<int> ids;
  std::vector<int64_t> widths;
  for (Var p : parts) {
    const Array& pv = t.val(p);
    for (int64_t r = 0; r < rows; ++r)
      for (int64_t c = 0; c < pv.cols; ++c) out.at(r, off + c) = pv.at(r, c);
    ids.push_back(p.id);
    widths.push_back(pv.cols);
    off += pv.cols;
  }
  return make_node(t, std::move(out), [ids, widths](Tape& t, int self) {
    const Array& g = t.grad_of(self);
    int64_t off = 0;
    for (size_t k = 0; k < ids.size(); ++k) {
      Array& gp = t.grad_of(ids[k]);
      for (int64_t r = 0; r < g.rows; ++r)
        for (int64_t c = 0; c < widths[k]; ++c) gp.at(r, c) += g.at(r, off + c);
      off += widths[k];
    }
  });
}

Var slice_cols(Var a, int64_t begin, int64_t len) {
  Tape& t = tape_of(a);
  const Array& av = t.val(a);
  if (begin < 0 || len < 0 || begin + len > av.cols) shape_error("slice_cols", av);
  Array out(av.rows, len);
  for (int64_t r = 0; r < av.rows; ++r)
    for (int64_t c = 0; c < len; ++c) out.at(r, c) = av.at(r, begin + c);
  const int ai = a.id;
  return make_node(t, std::move(out), [ai, begin, len](Tape& t, int self) {
    const Array& g = t.grad_of(self);
    Array& ga = t.grad_of(ai);
    for (int64_t r = 0; r < g.rows; ++r)
      for (int64_t c = 0; c < len; ++c) ga.at(r, begin + c) += g.at(r, c);
  });
}

Var slice_rows(Var a, int64_t begin, int64_t len) {
  Tape& t = tape_of(a);
  const Array& av = t.val(a);
  if (begin < 0 || len < 0 || begin + len > av.rows) shape_error("slice_rows", av);
  Array out(len, av.cols);
  for (int64_t r = 0; r < len; ++r)
    for (int64_t c = 0; c < av.cols; ++c) out.at(r, c) = av.at(begin + r, c);
  const int ai = a.id;
  return make_node(t, std::move(out), [ai, begin, len](Tape& t, int self) {
    const Array& g = t.grad_of(self);
    Array& ga = t.grad_of(ai);
    for (int64_t r = 0; r < len; ++r)
      for (int64_t c = 0; c < g.cols; ++c) ga.at(begin + r, c) += g.at(r, c);
  });
}

Var gather_rows(Var a, std::vector<int64_t> idx) {
  Tape& t = tape_of(a);
  const Array& av = t.val(a);
  Array out(static_cast<int64_t>(idx.size()), av.cols);
  for (size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] < 0 || idx[r] >= av.rows)
      throw std::out_of_range("gather_rows: index " + std::to_string(idx[r]) + " out of " +
                              av.shape_str());
    for (int64_t c = 0; c < av.cols; ++c) out.at(static_cast<int64_t>(r), c) = av.at(idx[r], c);
  }
  const int ai = a.id;
  return make_node(t, std::move(out), [ai, idx = std::move(idx)](Tape& t, int self) {
    const Array& g = t.grad_of(self);
    Array& ga = t.grad_of(ai);
    for (size_t r = 0; r < idx.size(); ++r)
      for (int64_t c = 0; c < g.cols; ++c) ga.at(idx[r], c) += g.at(static_cast<int64_t>(r), c);
  });
}

Var segment_sum_rows(Var a, std::vector<int64_t> seg, int64_t n_segments) {
  Tape& t = tape_of(a);
  const Array& av = t.val(a);
  if (static_cast<int64_t>(seg.size()) != av.rows)
    throw std::invalid_argument("segment_sum_rows: segment ids must match row count");
  Array out(n_segments, av.cols);
  for (size_t r = 0; r < seg.size(); ++r) {
    if (seg[r] < 0 || seg[r] >= n_segments) throw std::out_of_range("segment_sum_rows: bad segment id");
    for (int64_t c = 0; c < av.cols; ++c) out.at(seg[r], c) += av.at(static_cast<int64_t>(r), c);
  }
  const int ai = a.id;
  return make_node(t, std::move(out), [ai, seg = std::move(seg)](Tape& t, int self) {
    const Array& g = t.grad_of(self);
    Array& ga = t.grad_of(ai);
    for (size_t r = 0; r < seg.size(); ++r)
      for (int64_t c = 0; c < g.cols; ++c) ga.at(static_cast<int64_t>(r), c) += g.at(seg[r], c);
  });
}

// ---- reductions -------------------------------------------------------------

Var sum_all(Var a) {
  Tape& t = tape_of(a);
  const Array& av = t.val(a);
  double s = 0.0;
  for (double x : av.v) s += x;
  const int ai = a.id;
  return make_node(t, Array::scalar(s), [ai](Tape& t, int self) {
    const double g = t.grad_of(self).v[0];
    Array& ga = t.grad_of(ai);
    for (double& x : ga.v) x += g;
  });
}

Var mean_all(Var a) {
  Tape& t = tape_of(a);
  const double n = static_cast<double>(t.val(a).numel());
  return affine(sum_all(a), 1.0 / n, 0.0);
}

Var sum_rows(Var a) {
  Tape& t = tape_of(a);
  const Array& av = t.val(a);
  Array out(1, av.cols);
  for (int64_t r = 0; r < av.rows; ++r)
    for (int64_t c = 0; c < av.cols; ++c) out.at(0, c) += av.at(r, c);
  const int ai = a.id;
  return make_node(t, std::move(out), [ai](Tape& t, int self) {
    const Array& g = t.grad_of(self);
    Array& ga = t.grad_of(ai);
    for (int64_t r = 0; r < ga.rows; ++r)
      for (int64_t c = 0; c < ga.cols; ++c) ga.at(r, c) += g.at(0, c);
  });
}

Var mean_rows(Var a) {
  Tape& t = tape_of(a);
  const double n = static_cast<double>(t.val(a).rows);
  return affine(sum_rows(a), 1.0 / n, 0.0);
}

Var sum_cols(Var a) {
  Tape& t = tape_of(a);
  const Array& av = t.val(a);
  Array out(av.rows, 1);
  for (int64_t r = 0; r < av.rows; ++r)
    for (int64_t c = 0; c < av.cols; ++c) out.at(r, 0) += av.at(r, c);
  const int ai = a.id;
  return make_node(t, std::move(out), [ai](Tape& t, int self) {
    const Array& g = t.grad_of(self);
    Array& ga = t.grad_of(ai);
    for (int64_t r = 0; r < ga.rows; ++r)
      for (int64_t c = 0; c < ga.cols; ++c) ga.at(r, c) += g.at(r, 0);
  });
}

// ---- normalization and activations ------------------------------------------

Var layer_norm_rows(Var a, double eps) {
  Tape& t = tape_of(a);
  const Array& av = t.val(a);
  const int64_t R = av.rows, C = av.cols;
  Array out(R, C);
  std::vector<double> inv_std(static_cast<size_t>(R));
  for (int64_t r = 0; r < R; ++r) {
    double mu = 0.0;
    for (int64_t c = 0; c < C; ++c) mu += av.at(r, c);
    mu /= static_cast<double>(C);
    double var = 0.0;
    for (int64_t c = 0; c < C; ++c) {
      const double d = av.at(r, c) - mu;
      var += d * d;
    }
    var /= static_cast<double>(C);
    const double is = 1.0 / std::sqrt(var + eps);
    inv_std[static_cast<size_t>(r)] = is;
    for (int64_t c = 0; c < C; ++c) out.at(r, c) = (av.at(r, c) - mu) * is;
  }
  const int ai = a.id;
  return make_node(t, std::move(out), [ai, inv_std = std::move(inv_std)](Tape& t, int self) {
    const Array& g = t.grad_of(self);
    const Array& y = t.val_of(self);
    Array& ga = t.grad_of(ai);
    const int64_t C = g.cols;
    for (int64_t r = 0; r < g.rows; ++r) {
      double gm = 0.0, gym = 0.0;
      for (int64_t c = 0; c < C; ++c) {
        gm += g.at(r, c);
        gym += g.at(r, c) * y.at(r, c);
      }
      gm /= static_cast<double>(C);
      gym /= static_cast<double>(C);
      const double is = inv_std[static_cast<size_t>(r)];
      for (int64_t c = 0; c < C; ++c)
        ga.at(r, c) += is * (g.at(r, c) - gm - y.at(r, c) * gym);
    }
  });
}

Var softmax_rows(Var a) {
  Tape& t = tape_of(a);
  const Array& av = t.val(a);
  Array out(av.rows, av.cols);
  for (int64_t r = 0; r < av.rows; ++r) {
    double mx = av.at(r, 0);
    for (int64_t c = 1; c < av.cols; ++c) mx = std::max(mx, av.at(r, c));
    double z = 0.0;
    for (int64_t c = 0; c < av.cols; ++c) {
      const double e = std::exp(av.at(r, c) - mx);
      out.at(r, c) = e;
      z += e;
    }
    for (int64_t c = 0; c < av.cols; ++c) out.at(r, c) /= z;
  }
  const int ai = a.id;
  return make_node(t, std::move(out), [ai](Tape& t, int self) {
    const Array& g = t.grad_of(self);
    const Array& y = t.val_of(self);
    Array& ga = t.grad_of(ai);
    for (int64_t r = 0; r < g.rows; ++r) {
      double dot = 0.0;
      for (int64_t c = 0; c < g.cols; ++c) dot += g.at(r, c) * y.at(r, c);
      for (int64_t c = 0; c < g.cols; ++c) ga.at(r, c) += y.at(r, c) * (g.at(r, c) - dot);
    }
  });
}

Var silu(Var a) {
  return ew_unary(
      a, [](double x) { return x / (1.0 + std::exp(-x)); },
      [](double x, double) {
        const double s = 1.0 / (1.0 + std::exp(-x));
        return s * (1.0 + x * (1.0 - s));
      });
}

Var sigmoid(Var a) {
  return ew_unary(
      a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double, double y) { return y * (1.0 - y); });
}

Var exp_(Var a) {
  return ew_unary(
      a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log_(Var a) {
  return ew_unary(
      a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var sqrt_(Var a) {
  return ew_unary(
      a, [](double x) { return std::sqrt(x); },
      [](double, double y) { return 0.5 / y; });
}

Var acos_(Var a) {
  static constexpr double kClamp = 1.0 - 1e-9;
  return ew_unary(
      a,
      [](double x) {
        const double xc = std::max(-kClamp, std::min(kClamp, x));
        return std::acos(xc);
      },
      [](double x, double) {
        if (x <= -kClamp || x >= kClamp) return 0.0;
        return -1.0 / std::sqrt(1.0 - x * x);
      });
}

Var atan2_(Var y, Var x) {
  return ew_binary(
      "atan2", y, x, [](double yy, double xx) { return std::atan2(yy, xx); },
      [](double yy, double xx, double& dy, double& dx) {
        const double d = xx * xx + yy * yy;
        dy = xx / d;
        dx = -yy / d;
      });
}

Var masked_fill(Var a, const Array& mask, double value) {
  Tape& t = tape_of(a);
  const Array& av = t.val(a);
  if (!av.same_shape(mask)) shape_error("masked_fill", av, mask);
  Array out = av;
  for (size_t i = 0; i < out.v.size(); ++i)
    if (mask.v[i] != 0.0) out.v[i] = value;
  const int ai = a.id;
  std::vector<char> m(mask.v.size());
  for (size_t i = 0; i < m.size(); ++i) m[i] = mask.v[i] != 0.0;
  return make_node(t, std::move(out), [ai, m = std::move(m)](Tape& t, int self) {
    const Array& g = t.grad_of(self);
    Array& ga = t.grad_of(ai);
    for (size_t i = 0; i < g.v.size(); ++i)
      if (!m[i]) ga.v[i] += g.v[i];
  });
}

Var reshape(Var a, int64_t rows, int64_t cols) {
  Tape& t = tape_of(a);
  const Array& av = t.val(a);
  if (rows * cols != av.numel()) shape_error("reshape", av);
  Array out(rows, cols, av.v);
  const int ai = a.id;
  return make_node(t, std::move(out), [ai](Tape& t, int self) {
    const Array& g = t.grad_of(self);
    Array& ga = t.grad_of(ai);
    for (size_t i = 0; i < g.v.size(); ++i) ga.v[i] += g.v[i];
  });
}

Var transpose(Var a) {
  Tape& t = tape_of(a);
  const Array& av = t.val(a);
  Array out(av.cols, av.rows);
  for (int64_t r = 0; r < av.rows; ++r)
    for (int64_t c = 0; c < av.cols; ++c) out.at(c, r) = av.at(r, c);
  const int ai = a.id;
  return make_node(t, std::move(out), [ai](Tape& t, int self) {
    const Array& g = t.grad_of(self);
    Array& ga = t.grad_of(ai);
    for (int64_t r = 0; r < g.rows; ++r)
      for (int64_t c = 0; c < g.cols; ++c) ga.at(c, r) += g.at(r, c);
  });
}

// ---- composites --------------------------------------------------------------

Var square(Var a) { return mul(a, a); }

Var mse(Var a, Var b) { return mean_all(square(sub(a, b))); }

Var dot_rows(Var a, Var b) { return sum_cols(mul(a, b)); }

Var cross_rows(Var a, Var b) {
  Tape& t = tape_of(a);
  if (t.val(a).cols != 3 || t.val(b).cols != 3)
    throw std::invalid_argument("cross_rows: inputs must have 3 columns");
  Var ax = slice_cols(a, 0, 1), ay = slice_cols(a, 1, 1), az = slice_cols(a, 2, 1);
  Var bx = slice_cols(b, 0, 1), by = slice_cols(b, 1, 1), bz = slice_cols(b, 2, 1);
  return concat_cols({sub(mul(ay, bz), mul(az, by)), sub(mul(az, bx), mul(ax, bz)),
                      sub(mul(ax, by), mul(ay, bx))});
}

Var norm_rows(Var a) { return sqrt_(sum_cols(square(a))); }

}  // namespace polyforge::ad
