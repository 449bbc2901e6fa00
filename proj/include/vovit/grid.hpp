// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace vovit {

// Row-major rows x cols grid of reals. For spectral data rows are frequency
// bins and cols are frames.
struct RealGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  RealGrid() = default;
  RealGrid(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), values(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::size_t size() const { return values.size(); }
  bool same_shape(const RealGrid& o) const { return rows == o.rows && cols == o.cols; }
};

// Complex grid stored as separate real and imaginary planes.
struct ComplexGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> re;
  std::vector<double> im;

  ComplexGrid() = default;
  ComplexGrid(std::size_t r, std::size_t c) : rows(r), cols(c), re(r * c, 0.0), im(r * c, 0.0) {}

  std::complex<double> at(std::size_t r, std::size_t c) const {
    return {re[r * cols + c], im[r * cols + c]};
  }
  void set(std::size_t r, std::size_t c, std::complex<double> v) {
    re[r * cols + c] = v.real();
    im[r * cols + c] = v.imag();
  }
  std::size_t size() const { return re.size(); }
  bool same_shape(const ComplexGrid& o) const { return rows == o.rows && cols == o.cols; }
};

}  // namespace vovit
