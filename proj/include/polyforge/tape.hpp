#pragma once

#include <functional>
#include <string>
#include <vector>

#include "polyforge/array.hpp"

namespace polyforge::ad {

struct Parameter {
  std::string name;
  Array value;
  Array grad;
};

class Tape;

// Handle to a node on a tape. Cheap to copy; valid until the tape is reset.
struct Var {
  Tape* tape = nullptr;
  int id = -1;
};

// Records primitive operations for reverse-mode differentiation. Creation
// order is the topological order, so backward() walks nodes in reverse.
// With recording disabled the tape only materializes forward values.
class Tape {
 public:
  explicit Tape(bool recording = true) : recording_(recording) {}

  Var constant(Array a);
  Var scalar(double x) { return constant(Array::scalar(x)); }
  Var param(Parameter& p);

  const Array& val(Var v) const { return nodes_[static_cast<size_t>(v.id)].val; }
  const Array& grad(Var v) const { return nodes_[static_cast<size_t>(v.id)].grad; }

  // Reverse accumulation from a 1x1 loss node into every parameter leaf
  // reachable from it. Parameter gradients are accumulated (+=).
  void backward(Var loss);

  void reset();
  bool recording() const { return recording_; }
  void set_recording(bool r) { recording_ = r; }
  size_t size() const { return nodes_.size(); }

 private:
  friend Var make_node(Tape& t, Array val, std::function<void(Tape&, int)> back);
  friend struct NodeAccess;

  struct Node {
    Array val;
    Array grad;
    std::function<void(Tape&, int)> back;  // invoked with this node's id
  };

  std::vector<Node> nodes_;
  bool recording_;

 public:
  Array& grad_of(int id) { return nodes_[static_cast<size_t>(id)].grad; }
  const Array& val_of(int id) const { return nodes_[static_cast<size_t>(id)].val; }
};

// ---- primitive set -------------------------------------------------------
// Elementwise binary ops broadcast the right operand when it is 1x1, a row
// (1xC) or a column (Rx1) against the left operand's shape.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var div(Var a, Var b);
Var neg(Var a);
Var affine(Var a, double k, double b);  // k*a + b elementwise
Var matmul(Var a, Var b, bool trans_a = false, bool trans_b = false);
Var concat_cols(const std::vector<Var>& parts);
Var slice_cols(Var a, int64_t begin, int64_t len);
Var slice_rows(Var a, int64_t begin, int64_t len);
Var gather_rows(Var a, std::vector<int64_t> idx);  // embedding lookup
Var segment_sum_rows(Var a, std::vector<int64_t> seg, int64_t n_segments);
Var sum_all(Var a);
Var mean_all(Var a);
Var sum_rows(Var a);   // (R,C) -> (1,C)
Var mean_rows(Var a);  // (R,C) -> (1,C)
Var sum_cols(Var a);   // (R,C) -> (R,1)
Var layer_norm_rows(Var a, double eps = 1e-5);
Var softmax_rows(Var a);
Var silu(Var a);
Var sigmoid(Var a);
Var exp_(Var a);
Var log_(Var a);
Var sqrt_(Var a);
Var acos_(Var a);  // input clamped to +-(1 - 1e-9); zero gradient past the clamp
Var atan2_(Var y, Var x);
Var masked_fill(Var a, const Array& mask, double value);  // mask != 0 -> value
Var reshape(Var a, int64_t rows, int64_t cols);
Var transpose(Var a);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }

// ---- composites (no new reverse rules) -----------------------------------
Var square(Var a);
Var mse(Var a, Var b);                 // mean over all entries of (a-b)^2
Var dot_rows(Var a, Var b);            // (M,3)x(M,3) -> (M,1)
Var cross_rows(Var a, Var b);          // (M,3)x(M,3) -> (M,3)
Var norm_rows(Var a);                  // (M,C) -> (M,1) Euclidean row norms

}  // namespace polyforge::ad
