// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "vovit/weights.hpp"

// Inference-only building blocks shared by the motion, separator and
// enhancer networks. Sequences are row-major (rows = time steps).
namespace vovit::nn {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

double gelu(double x);
Mat gelu(const Mat& x);
Mat relu(const Mat& x);

struct Linear {
  Mat weight;  // out x in
  Vec bias;    // out

  Mat forward(const Mat& x) const;
  Eigen::Index in_features() const { return weight.cols(); }
  Eigen::Index out_features() const { return weight.rows(); }
};

struct LayerNorm {
  Vec gamma;
  Vec beta;
  double eps = 1e-5;

  Mat forward(const Mat& x) const;
};

struct FeedForward {
  Linear fc1;
  Linear fc2;

  Mat forward(const Mat& x) const;  // fc2(GELU(fc1(x)))
};

// Collects softmax rows seen during a forward pass so callers can check
// that every attention distribution is non-negative and sums to one.
struct AttentionProbe {
  std::size_t rows = 0;
  double min_weight = std::numeric_limits<double>::infinity();
  double max_row_sum_error = 0.0;

  void record(const Mat& weights);
};

void softmax_rows(Mat& scores);

struct MultiHeadAttention {
  Linear q, k, v, o;
  int heads = 1;

  // query: Lq x d, memory: Lk x d. With causal set, query row i only sees
  // memory rows <= i.
  Mat forward(const Mat& query, const Mat& memory, bool causal = false, AttentionProbe* probe = nullptr) const;
  // Self-attention restricted to consecutive groups of `group` rows.
  Mat forward_grouped(const Mat& x, Eigen::Index group, AttentionProbe* probe = nullptr) const;
};

// Channel-major feature map: data[(c * height + y) * width + x].
struct FeatureMap {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  FeatureMap() = default;
  FeatureMap(int c, int h, int w) : channels(c), height(h), width(w), data(std::size_t(c) * h * w, 0.0) {}
  double& at(int c, int y, int x) { return data[(std::size_t(c) * height + y) * width + x]; }
  double at(int c, int y, int x) const { return data[(std::size_t(c) * height + y) * width + x]; }
};

struct Conv2d {
  int in_channels = 0, out_channels = 0;
  int kernel_h = 1, kernel_w = 1;
  int stride_h = 1, stride_w = 1;
  int pad_h = 0, pad_w = 0;
  int dilation_h = 1, dilation_w = 1;
  Mat weight;  // out x (in * kh * kw)
  Vec bias;

  int out_height(int h) const { return (h + 2 * pad_h - dilation_h * (kernel_h - 1) - 1) / stride_h + 1; }
  int out_width(int w) const { return (w + 2 * pad_w - dilation_w * (kernel_w - 1) - 1) / stride_w + 1; }
  FeatureMap forward(const FeatureMap& x) const;
};

struct ConvTranspose2d {
  int in_channels = 0, out_channels = 0;
  int kernel = 4, stride = 2, pad = 1;
  Mat weight;  // in x (out * k * k)
  Vec bias;

  int out_size(int n) const { return (n - 1) * stride - 2 * pad + kernel; }
  FeatureMap forward(const FeatureMap& x) const;
};

FeatureMap concat_channels(const FeatureMap& a, const FeatureMap& b);
void apply_relu(FeatureMap& x);
void apply_leaky_relu(FeatureMap& x, double slope);

// Parameter declarations and archive binding helpers.
void linear_specs(std::vector<weights::ParamSpec>& out, const std::string& prefix, std::size_t in, std::size_t out_f);
void layer_norm_specs(std::vector<weights::ParamSpec>& out, const std::string& prefix, std::size_t d);
void attention_specs(std::vector<weights::ParamSpec>& out, const std::string& prefix, std::size_t d);
void conv_specs(std::vector<weights::ParamSpec>& out, const std::string& prefix, std::size_t in, std::size_t out_c,
                std::size_t kh, std::size_t kw);
void conv_transpose_specs(std::vector<weights::ParamSpec>& out, const std::string& prefix, std::size_t in,
                          std::size_t out_c, std::size_t k);

Mat to_mat(const weights::Tensor& t, Eigen::Index rows, Eigen::Index cols);
Vec to_vec(const weights::Tensor& t);

Linear bind_linear(const weights::WeightArchive& a, const std::string& prefix, std::size_t in, std::size_t out);
LayerNorm bind_layer_norm(const weights::WeightArchive& a, const std::string& prefix, std::size_t d);
MultiHeadAttention bind_attention(const weights::WeightArchive& a, const std::string& prefix, std::size_t d,
                                  int heads);
Conv2d bind_conv(const weights::WeightArchive& a, const std::string& prefix, std::size_t in, std::size_t out,
                 std::size_t kh, std::size_t kw);
ConvTranspose2d bind_conv_transpose(const weights::WeightArchive& a, const std::string& prefix, std::size_t in,
                                    std::size_t out, std::size_t k);

}  // namespace vovit::nn
