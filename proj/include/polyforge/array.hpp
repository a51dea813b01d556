#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyforge::ad {

// Dense row-major 2D array of 64-bit reals. Scalars are 1x1, row vectors
// 1xC, column vectors Rx1. All trainable state and activations use this.
struct Array {
  int64_t rows = 0;
  int64_t cols = 0;
  std::vector<double> v;

  Array() = default;
  Array(int64_t r, int64_t c) : rows(r), cols(c), v(static_cast<size_t>(r * c), 0.0) {
    if (r < 0 || c < 0) throw std::invalid_argument("array: negative dimension");
  }
  Array(int64_t r, int64_t c, std::vector<double> data) : rows(r), cols(c), v(std::move(data)) {
    if (static_cast<int64_t>(v.size()) != r * c)
      throw std::invalid_argument("array: data size does not match shape");
  }

  static Array zeros(int64_t r, int64_t c) { return Array(r, c); }
  static Array full(int64_t r, int64_t c, double x) {
    Array a(r, c);
    std::fill(a.v.begin(), a.v.end(), x);
    return a;
  }
  static Array scalar(double x) { return Array(1, 1, {x}); }
  static Array identity(int64_t n) {
    Array a(n, n);
    for (int64_t i = 0; i < n; ++i) a.v[static_cast<size_t>(i * n + i)] = 1.0;
    return a;
  }

  int64_t numel() const { return rows * cols; }
  bool same_shape(const Array& o) const { return rows == o.rows && cols == o.cols; }
  bool is_scalar() const { return rows == 1 && cols == 1; }

  double& at(int64_t r, int64_t c) { return v[static_cast<size_t>(r * cols + c)]; }
  double at(int64_t r, int64_t c) const { return v[static_cast<size_t>(r * cols + c)]; }

  std::string shape_str() const {
    return "(" + std::to_string(rows) + ", " + std::to_string(cols) + ")";
  }
};

bool all_finite(const Array& a);

}  // namespace polyforge::ad
