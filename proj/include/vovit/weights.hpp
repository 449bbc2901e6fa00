// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vovit::weights {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_string(const Shape& shape);

struct Tensor {
  Shape shape;
  std::vector<float> values;
};

enum class InitKind { kUniform, kOnes, kZeros };

// Declares one named parameter; fan_in sets the uniform init scale.
struct ParamSpec {
  std::string name;
  Shape shape;
  std::size_t fan_in = 1;
  InitKind init = InitKind::kUniform;
};

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);
std::uint64_t fnv1a64(std::string_view text);

// Counter-based generator: element `index` of tensor `name` under `seed` is
//   z = splitmix64_finalize((seed ^ fnv1a64(name)) + (index + 1) * 0x9E3779B97F4A7C15)
//   u = (z >> 40) / 2^24,  value = 2u - 1  in [-1, 1)
// so every element is independent of generation order.
double counter_uniform(std::uint64_t seed, std::string_view name, std::uint64_t index);

// Named f32 tensors with a deterministic binary layout:
//   "VVWA" | version u32 LE | manifest_len u64 LE | manifest JSON | blob | FNV-1a(blob) u64 LE
// The manifest maps name -> {"dtype": "f32", "shape": [...], "offset": bytes}.
class WeightArchive {
 public:
  static constexpr std::uint32_t kVersion = 1;

  void put(std::string name, Tensor tensor);
  bool contains(const std::string& name) const { return tensors_.count(name) != 0; }
  const Tensor& get(const std::string& name) const;
  // Fetches a tensor and checks its shape; failures name the tensor.
  const Tensor& require(const std::string& name, const Shape& shape) const;

  const std::map<std::string, Tensor>& tensors() const { return tensors_; }
  std::size_t parameter_count() const;

  std::vector<std::uint8_t> save() const;
  static WeightArchive load(std::span<const std::uint8_t> bytes);
  std::uint64_t checksum() const;

 private:
  std::vector<std::uint8_t> blob() const;
  std::map<std::string, Tensor> tensors_;
};

WeightArchive init_weights(const std::vector<ParamSpec>& specs, std::uint64_t seed);
std::size_t parameter_count(const std::vector<ParamSpec>& specs);

WeightArchive load_archive_file(const std::string& path);
void save_archive_file(const std::string& path, const WeightArchive& archive);

}  // namespace vovit::weights
