// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vovit/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "vovit/error.hpp"
#include "vovit/io.hpp"

namespace vovit::wav {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t u32(std::span<const std::uint8_t> b, std::size_t at) {
  return std::uint32_t(b[at]) | std::uint32_t(b[at + 1]) << 8 | std::uint32_t(b[at + 2]) << 16 |
         std::uint32_t(b[at + 3]) << 24;
}
std::uint16_t u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | b[at + 1] << 8);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

}  // namespace

spectral::Waveform decode(std::span<const std::uint8_t> b) {
  if (b.size() < 12 || !tag_is(b, 0, "RIFF") || !tag_is(b, 8, "WAVE"))
    throw Error(errc::kFormat, "not a RIFF/WAVE stream");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::span<const std::uint8_t> payload;
  bool have_fmt = false, have_data = false;

  std::size_t at = 12;
  while (at + 8 <= b.size()) {
    const std::uint32_t size = u32(b, at + 4);
    const std::size_t body = at + 8;
    const std::size_t avail = std::min<std::size_t>(size, b.size() - body);
    if (tag_is(b, at, "fmt ")) {
      if (avail < 16) throw Error(errc::kFormat, "truncated fmt chunk");
      format = u16(b, body);
      channels = u16(b, body + 2);
      rate = u32(b, body + 4);
      bits = u16(b, body + 14);
      if (format == kFormatExtensible && avail >= 26) format = u16(b, body + 24);
      have_fmt = true;
    } else if (tag_is(b, at, "data")) {
      payload = b.subspan(body, avail);
      have_data = true;
    }
    at = body + size + (size & 1u);
  }
  if (!have_fmt || !have_data) throw Error(errc::kFormat, "missing fmt or data chunk");
  if (channels == 0 || rate == 0) throw Error(errc::kFormat, "invalid channel count or sample rate");

  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !f32)
    throw Error(errc::kFormat, "unsupported sample format (need PCM 16-bit or float 32-bit), got format " +
                                   std::to_string(format) + " with " + std::to_string(bits) + " bits");

  const std::size_t bytes_per = bits / 8;
  const std::size_t frames = payload.size() / (bytes_per * channels);
  spectral::Waveform w;
  w.sample_rate_hz = static_cast<int>(rate);
  w.samples.assign(frames, 0.0);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t off = (i * channels + c) * bytes_per;
      if (pcm16) {
        acc += static_cast<std::int16_t>(u16(payload, off)) / 32768.0;
      } else {
        acc += std::bit_cast<float>(u32(payload, off));
      }
    }
    w.samples[i] = acc / channels;
  }
  return w;
}

std::vector<std::uint8_t> encode(const spectral::Waveform& w, SampleFormat fmt) {
  const std::uint16_t bits = fmt == SampleFormat::kPcm16 ? 16 : 32;
  const std::uint16_t format = fmt == SampleFormat::kPcm16 ? kFormatPcm : kFormatFloat;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(w.samples.size() * (bits / 8));

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, format);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz));
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz) * (bits / 8));
  put_u16(out, bits / 8);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (double s : w.samples) {
    if (fmt == SampleFormat::kPcm16) {
      const double q = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
      put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    } else {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));
    }
  }
  return out;
}

spectral::Waveform read(const std::string& path) {
  const auto bytes = io::read_bytes(path);
  return decode(bytes);
}

void write(const std::string& path, const spectral::Waveform& w, SampleFormat fmt) {
  io::write_bytes(path, encode(w, fmt));
}

}  // namespace vovit::wav
