// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vovit/weights.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "json.hpp"
#include "vovit/error.hpp"
#include "vovit/io.hpp"

namespace vovit::weights {

namespace {

constexpr char kMagic[4] = {'V', 'V', 'W', 'A'};
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> b, std::size_t at, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= std::uint64_t(b[at + i]) << (8 * i);
  return v;
}

std::string manifest_json(const std::map<std::string, Tensor>& tensors) {
  nlohmann::json manifest = nlohmann::json::object();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : tensors) {
    manifest[name] = {{"dtype", "f32"}, {"shape", t.shape}, {"offset", offset}};
    offset += t.values.size() * 4;
  }
  return manifest.dump();
}

}  // namespace

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? ", " : "") + std::to_string(shape[i]);
  return s + "]";
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = kFnvOffset;
  for (auto b : bytes) {
    h ^= b;
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view text) {
  return fnv1a64(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

double counter_uniform(std::uint64_t seed, std::string_view name, std::uint64_t index) {
  const std::uint64_t z = splitmix_finalize((seed ^ fnv1a64(name)) + (index + 1) * kGolden);
  const double u = static_cast<double>(z >> 40) / static_cast<double>(1ULL << 24);
  return 2.0 * u - 1.0;
}

void WeightArchive::put(std::string name, Tensor tensor) {
  if (numel(tensor.shape) != tensor.values.size())
    throw Error(errc::kShapeMismatch, "tensor '" + name + "': value count does not match shape");
  tensors_[std::move(name)] = std::move(tensor);
}

const Tensor& WeightArchive::get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw Error(errc::kBind, "missing tensor '" + name + "'");
  return it->second;
}

const Tensor& WeightArchive::require(const std::string& name, const Shape& shape) const {
  const Tensor& t = get(name);
  if (t.shape != shape)
    throw Error(errc::kBind, "tensor '" + name + "' has shape " + shape_string(t.shape) + ", expected " +
                                 shape_string(shape));
  return t;
}

std::size_t WeightArchive::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [_, t] : tensors_) n += t.values.size();
  return n;
}

std::vector<std::uint8_t> WeightArchive::blob() const {
  std::vector<std::uint8_t> out;
  out.reserve(parameter_count() * 4);
  for (const auto& [_, t] : tensors_)
    for (float v : t.values) put_le(out, std::bit_cast<std::uint32_t>(v), 4);
  return out;
}

std::uint64_t WeightArchive::checksum() const { return fnv1a64(blob()); }

std::vector<std::uint8_t> WeightArchive::save() const {
  const std::string manifest = manifest_json(tensors_);
  const auto payload = blob();
  std::vector<std::uint8_t> out;
  out.reserve(16 + manifest.size() + payload.size() + 8);
  out.insert(out.end(), kMagic, kMagic + 4);
  put_le(out, kVersion, 4);
  put_le(out, manifest.size(), 8);
  out.insert(out.end(), manifest.begin(), manifest.end());
  out.insert(out.end(), payload.begin(), payload.end());
  put_le(out, fnv1a64(payload), 8);
  return out;
}

WeightArchive WeightArchive::load(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw Error(errc::kBadMagic, "weight archive: bad magic (expected VVWA)");
  if (bytes.size() < 24) throw Error(errc::kCorruptArchive, "weight archive: truncated header");
  const auto version = get_le(bytes, 4, 4);
  if (version != kVersion)
    throw Error(errc::kCorruptArchive, "weight archive: unsupported version " + std::to_string(version));
  const auto manifest_len = get_le(bytes, 8, 8);
  if (manifest_len > bytes.size() - 24) throw Error(errc::kCorruptArchive, "weight archive: manifest overruns file");

  const std::size_t blob_start = 16 + manifest_len;
  const std::size_t blob_size = bytes.size() - 8 - blob_start;
  const auto blob = bytes.subspan(blob_start, blob_size);
  const auto stored = get_le(bytes, bytes.size() - 8, 8);
  if (fnv1a64(blob) != stored) throw Error(errc::kChecksum, "weight archive: checksum mismatch");

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(bytes.begin() + 16, bytes.begin() + blob_start);
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::kCorruptArchive, std::string("weight archive: bad manifest: ") + e.what());
  }
  if (!manifest.is_object()) throw Error(errc::kCorruptArchive, "weight archive: manifest must be an object");

  WeightArchive archive;
  std::uint64_t previous_end = 0;
  for (const auto& [name, entry] : manifest.items()) {
    try {
      if (entry.at("dtype").get<std::string>() != "f32")
        throw Error(errc::kCorruptArchive, "weight archive: tensor '" + name + "' is not f32");
      Tensor t;
      t.shape = entry.at("shape").get<Shape>();
      const auto offset = entry.at("offset").get<std::uint64_t>();
      const std::uint64_t extent = numel(t.shape) * 4;
      if (offset % 4 != 0) throw Error(errc::kCorruptArchive, "weight archive: tensor '" + name + "' misaligned");
      if (offset < previous_end)
        throw Error(errc::kCorruptArchive, "weight archive: tensor '" + name + "' overlaps its predecessor");
      if (offset + extent > blob_size)
        throw Error(errc::kCorruptArchive, "weight archive: tensor '" + name + "' extends past the blob");
      previous_end = offset + extent;
      t.values.resize(numel(t.shape));
      for (std::size_t i = 0; i < t.values.size(); ++i)
        t.values[i] = std::bit_cast<float>(static_cast<std::uint32_t>(get_le(blob, offset + 4 * i, 4)));
      archive.tensors_.emplace(name, std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw Error(errc::kCorruptArchive, "weight archive: bad entry '" + name + "': " + e.what());
    }
  }
  return archive;
}

WeightArchive init_weights(const std::vector<ParamSpec>& specs, std::uint64_t seed) {
  WeightArchive archive;
  for (const auto& spec : specs) {
    Tensor t{spec.shape, std::vector<float>(numel(spec.shape))};
    const double scale = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(spec.fan_in, 1)));
    for (std::size_t i = 0; i < t.values.size(); ++i) {
      switch (spec.init) {
        case InitKind::kOnes: t.values[i] = 1.0f; break;
        case InitKind::kZeros: t.values[i] = 0.0f; break;
        case InitKind::kUniform:
          t.values[i] = static_cast<float>(scale * counter_uniform(seed, spec.name, i));
          break;
      }
    }
    archive.put(spec.name, std::move(t));
  }
  return archive;
}

std::size_t parameter_count(const std::vector<ParamSpec>& specs) {
  std::size_t n = 0;
  for (const auto& s : specs) n += numel(s.shape);
  return n;
}

WeightArchive load_archive_file(const std::string& path) {
  const auto bytes = io::read_bytes(path);
  return WeightArchive::load(bytes);
}

void save_archive_file(const std::string& path, const WeightArchive& archive) {
  io::write_bytes(path, archive.save());
}

}  // namespace vovit::weights
