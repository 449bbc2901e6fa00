// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vovit/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vovit/error.hpp"

namespace vovit::nn {

using MatMap = Eigen::Map<Mat>;
using ConstMatMap = Eigen::Map<const Mat>;

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

Mat gelu(const Mat& x) { return x.unaryExpr([](double v) { return gelu(v); }); }

Mat relu(const Mat& x) { return x.cwiseMax(0.0); }

Mat Linear::forward(const Mat& x) const {
  if (x.cols() != weight.cols())
    throw Error(errc::kShapeMismatch, "linear: input width " + std::to_string(x.cols()) + ", expected " +
                                          std::to_string(weight.cols()));
  Mat y = x * weight.transpose();
  y.rowwise() += bias.transpose();
  return y;
}

Mat LayerNorm::forward(const Mat& x) const {
  Mat y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).mean();
    const double var = (x.row(r).array() - mean).square().mean();
    const double inv = 1.0 / std::sqrt(var + eps);
    y.row(r) = ((x.row(r).array() - mean) * inv).matrix().cwiseProduct(gamma.transpose()) + beta.transpose();
  }
  return y;
}

Mat FeedForward::forward(const Mat& x) const { return fc2.forward(gelu(fc1.forward(x))); }

void AttentionProbe::record(const Mat& weights) {
  rows += static_cast<std::size_t>(weights.rows());
  if (weights.size() == 0) return;
  min_weight = std::min(min_weight, weights.minCoeff());
  for (Eigen::Index r = 0; r < weights.rows(); ++r)
    max_row_sum_error = std::max(max_row_sum_error, std::abs(weights.row(r).sum() - 1.0));
}

void softmax_rows(Mat& scores) {
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    auto row = scores.row(r);
    const double peak = row.maxCoeff();
    row = (row.array() - peak).exp();
    row /= row.sum();
  }
}

namespace {

void attend(const Mat& q, const Mat& k, const Mat& v, int heads, bool causal, AttentionProbe* probe,
            Eigen::Ref<Mat> out) {
  const Eigen::Index d = q.cols();
  const Eigen::Index dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  for (int h = 0; h < heads; ++h) {
    Mat scores = (q.middleCols(h * dh, dh) * k.middleCols(h * dh, dh).transpose()) * scale;
    if (causal) {
      for (Eigen::Index i = 0; i < scores.rows(); ++i)
        for (Eigen::Index j = i + 1; j < scores.cols(); ++j) scores(i, j) = -std::numeric_limits<double>::infinity();
    }
    softmax_rows(scores);
    if (probe) probe->record(scores);
    out.middleCols(h * dh, dh) = scores * v.middleCols(h * dh, dh);
  }
}

void check_heads(const MultiHeadAttention& mha) {
  if (mha.heads < 1 || mha.q.out_features() % mha.heads != 0)
    throw Error(errc::kShapeMismatch, "attention: width not divisible by head count");
}

}  // namespace

Mat MultiHeadAttention::forward(const Mat& query, const Mat& memory, bool causal, AttentionProbe* probe) const {
  check_heads(*this);
  const Mat qp = q.forward(query);
  const Mat kp = k.forward(memory);
  const Mat vp = v.forward(memory);
  Mat mixed(query.rows(), qp.cols());
  attend(qp, kp, vp, heads, causal, probe, mixed);
  return o.forward(mixed);
}

Mat MultiHeadAttention::forward_grouped(const Mat& x, Eigen::Index group, AttentionProbe* probe) const {
  check_heads(*this);
  if (group <= 0 || x.rows() % group != 0) throw Error(errc::kShapeMismatch, "attention: ragged groups");
  const Mat qp = q.forward(x);
  const Mat kp = k.forward(x);
  const Mat vp = v.forward(x);
  Mat mixed(x.rows(), qp.cols());
  for (Eigen::Index g = 0; g < x.rows(); g += group) {
    attend(qp.middleRows(g, group), kp.middleRows(g, group), vp.middleRows(g, group), heads, false, probe,
           mixed.middleRows(g, group));
  }
  return o.forward(mixed);
}

FeatureMap Conv2d::forward(const FeatureMap& x) const {
  if (x.channels != in_channels)
    throw Error(errc::kShapeMismatch, "conv2d: " + std::to_string(x.channels) + " input channels, expected " +
                                          std::to_string(in_channels));
  const int ho = out_height(x.height), wo = out_width(x.width);
  if (ho <= 0 || wo <= 0) throw Error(errc::kShapeMismatch, "conv2d: input smaller than kernel");
  FeatureMap y(out_channels, ho, wo);
  const Eigen::Index taps = Eigen::Index(in_channels) * kernel_h * kernel_w;
  const int rows_per_chunk = std::max(1, 4096 / wo);
  Mat cols(taps, Eigen::Index(rows_per_chunk) * wo);
  MatMap out(y.data.data(), out_channels, Eigen::Index(ho) * wo);

  for (int oy0 = 0; oy0 < ho; oy0 += rows_per_chunk) {
    const int oy1 = std::min(ho, oy0 + rows_per_chunk);
    const Eigen::Index n = Eigen::Index(oy1 - oy0) * wo;
    for (int c = 0; c < in_channels; ++c) {
      for (int ky = 0; ky < kernel_h; ++ky) {
        for (int kx = 0; kx < kernel_w; ++kx) {
          double* row = cols.row((Eigen::Index(c) * kernel_h + ky) * kernel_w + kx).data();
          const int x_off = kx * dilation_w - pad_w;
          for (int oy = oy0; oy < oy1; ++oy) {
            double* dst = row + Eigen::Index(oy - oy0) * wo;
            const int iy = oy * stride_h - pad_h + ky * dilation_h;
            if (iy < 0 || iy >= x.height) {
              std::fill(dst, dst + wo, 0.0);
              continue;
            }
            const double* src = &x.data[(std::size_t(c) * x.height + iy) * x.width];
            if (stride_w == 1) {
              const int lo = std::clamp(-x_off, 0, wo);
              const int hi = std::clamp(x.width - x_off, lo, wo);
              std::fill(dst, dst + lo, 0.0);
              std::copy(src + lo + x_off, src + hi + x_off, dst + lo);
              std::fill(dst + hi, dst + wo, 0.0);
            } else {
              for (int ox = 0; ox < wo; ++ox) {
                const int ix = ox * stride_w + x_off;
                dst[ox] = (ix >= 0 && ix < x.width) ? src[ix] : 0.0;
              }
            }
          }
        }
      }
    }
    out.middleCols(Eigen::Index(oy0) * wo, n).noalias() = weight * cols.leftCols(n);
  }
  out.colwise() += bias;
  return y;
}

FeatureMap ConvTranspose2d::forward(const FeatureMap& x) const {
  if (x.channels != in_channels)
    throw Error(errc::kShapeMismatch, "conv_transpose2d: " + std::to_string(x.channels) +
                                          " input channels, expected " + std::to_string(in_channels));
  const int ho = out_size(x.height), wo = out_size(x.width);
  FeatureMap y(out_channels, ho, wo);
  const Eigen::Index plane = Eigen::Index(x.height) * x.width;
  ConstMatMap in(x.data.data(), in_channels, plane);
  const int rows_per_chunk = std::max(1, 2048 / x.width);
  const Mat wt = weight.transpose();  // (out * k * k) x in

  for (int iy0 = 0; iy0 < x.height; iy0 += rows_per_chunk) {
    const int iy1 = std::min(x.height, iy0 + rows_per_chunk);
    const Eigen::Index n = Eigen::Index(iy1 - iy0) * x.width;
    const Mat cols = wt * in.middleCols(Eigen::Index(iy0) * x.width, n);
    for (int co = 0; co < out_channels; ++co) {
      for (int ky = 0; ky < kernel; ++ky) {
        for (int kx = 0; kx < kernel; ++kx) {
          const double* src = cols.row((Eigen::Index(co) * kernel + ky) * kernel + kx).data();
          for (int iy = iy0; iy < iy1; ++iy) {
            const int oy = iy * stride - pad + ky;
            if (oy < 0 || oy >= ho) continue;
            double* dst = &y.data[(std::size_t(co) * ho + oy) * wo];
            const double* s = src + Eigen::Index(iy - iy0) * x.width;
            for (int ix = 0; ix < x.width; ++ix) {
              const int ox = ix * stride - pad + kx;
              if (ox >= 0 && ox < wo) dst[ox] += s[ix];
            }
          }
        }
      }
    }
  }
  for (int co = 0; co < out_channels; ++co) {
    double* p = &y.data[std::size_t(co) * ho * wo];
    for (std::size_t i = 0; i < std::size_t(ho) * wo; ++i) p[i] += bias(co);
  }
  return y;
}

FeatureMap concat_channels(const FeatureMap& a, const FeatureMap& b) {
  if (a.height != b.height || a.width != b.width) throw Error(errc::kShapeMismatch, "concat: spatial mismatch");
  FeatureMap y(a.channels + b.channels, a.height, a.width);
  std::copy(a.data.begin(), a.data.end(), y.data.begin());
  std::copy(b.data.begin(), b.data.end(), y.data.begin() + static_cast<std::ptrdiff_t>(a.data.size()));
  return y;
}

void apply_relu(FeatureMap& x) {
  for (double& v : x.data) v = std::max(v, 0.0);
}

void apply_leaky_relu(FeatureMap& x, double slope) {
  for (double& v : x.data) v = v >= 0.0 ? v : slope * v;
}

void linear_specs(std::vector<weights::ParamSpec>& out, const std::string& prefix, std::size_t in, std::size_t out_f) {
  out.push_back({prefix + ".weight", {out_f, in}, in});
  out.push_back({prefix + ".bias", {out_f}, in});
}

void layer_norm_specs(std::vector<weights::ParamSpec>& out, const std::string& prefix, std::size_t d) {
  out.push_back({prefix + ".weight", {d}, d, weights::InitKind::kOnes});
  out.push_back({prefix + ".bias", {d}, d, weights::InitKind::kZeros});
}

void attention_specs(std::vector<weights::ParamSpec>& out, const std::string& prefix, std::size_t d) {
  for (const char* p : {"q", "k", "v", "o"}) linear_specs(out, prefix + "." + p, d, d);
}

void conv_specs(std::vector<weights::ParamSpec>& out, const std::string& prefix, std::size_t in, std::size_t out_c,
                std::size_t kh, std::size_t kw) {
  out.push_back({prefix + ".weight", {out_c, in, kh, kw}, in * kh * kw});
  out.push_back({prefix + ".bias", {out_c}, in * kh * kw});
}

void conv_transpose_specs(std::vector<weights::ParamSpec>& out, const std::string& prefix, std::size_t in,
                          std::size_t out_c, std::size_t k) {
  out.push_back({prefix + ".weight", {in, out_c, k, k}, in * k * k});
  out.push_back({prefix + ".bias", {out_c}, in * k * k});
}

Mat to_mat(const weights::Tensor& t, Eigen::Index rows, Eigen::Index cols) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = t.values[static_cast<std::size_t>(i)];
  return m;
}

Vec to_vec(const weights::Tensor& t) {
  Vec v(static_cast<Eigen::Index>(t.values.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = t.values[static_cast<std::size_t>(i)];
  return v;
}

Linear bind_linear(const weights::WeightArchive& a, const std::string& prefix, std::size_t in, std::size_t out) {
  Linear l;
  l.weight = to_mat(a.require(prefix + ".weight", {out, in}), Eigen::Index(out), Eigen::Index(in));
  l.bias = to_vec(a.require(prefix + ".bias", {out}));
  return l;
}

LayerNorm bind_layer_norm(const weights::WeightArchive& a, const std::string& prefix, std::size_t d) {
  LayerNorm n;
  n.gamma = to_vec(a.require(prefix + ".weight", {d}));
  n.beta = to_vec(a.require(prefix + ".bias", {d}));
  return n;
}

MultiHeadAttention bind_attention(const weights::WeightArchive& a, const std::string& prefix, std::size_t d,
                                  int heads) {
  MultiHeadAttention m;
  m.q = bind_linear(a, prefix + ".q", d, d);
  m.k = bind_linear(a, prefix + ".k", d, d);
  m.v = bind_linear(a, prefix + ".v", d, d);
  m.o = bind_linear(a, prefix + ".o", d, d);
  m.heads = heads;
  return m;
}

Conv2d bind_conv(const weights::WeightArchive& a, const std::string& prefix, std::size_t in, std::size_t out,
                 std::size_t kh, std::size_t kw) {
  Conv2d c;
  c.in_channels = static_cast<int>(in);
  c.out_channels = static_cast<int>(out);
  c.kernel_h = static_cast<int>(kh);
  c.kernel_w = static_cast<int>(kw);
  c.weight = to_mat(a.require(prefix + ".weight", {out, in, kh, kw}), Eigen::Index(out), Eigen::Index(in * kh * kw));
  c.bias = to_vec(a.require(prefix + ".bias", {out}));
  return c;
}

ConvTranspose2d bind_conv_transpose(const weights::WeightArchive& a, const std::string& prefix, std::size_t in,
                                    std::size_t out, std::size_t k) {
  ConvTranspose2d c;
  c.in_channels = static_cast<int>(in);
  c.out_channels = static_cast<int>(out);
  c.kernel = static_cast<int>(k);
  c.weight = to_mat(a.require(prefix + ".weight", {in, out, k, k}), Eigen::Index(in), Eigen::Index(out * k * k));
  c.bias = to_vec(a.require(prefix + ".bias", {out}));
  return c;
}

}  // namespace vovit::nn
