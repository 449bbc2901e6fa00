// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vovit::io {

std::vector<std::uint8_t> read_bytes(const std::string& path);
void write_bytes(const std::string& path, std::span<const std::uint8_t> bytes);
std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace vovit::io
