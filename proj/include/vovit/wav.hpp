// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vovit/spectral.hpp"

namespace vovit::wav {

enum class SampleFormat { kPcm16, kFloat32 };

// Little-endian RIFF/WAVE, PCM 16-bit or IEEE float 32-bit. Multi-channel
// input is averaged down to mono.
spectral::Waveform decode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode(const spectral::Waveform& w, SampleFormat fmt = SampleFormat::kFloat32);

spectral::Waveform read(const std::string& path);
void write(const std::string& path, const spectral::Waveform& w, SampleFormat fmt = SampleFormat::kFloat32);

}  // namespace vovit::wav
