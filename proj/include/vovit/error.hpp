// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <stdexcept>
#include <string>

namespace vovit {

// Every failure raised by the library carries a stable machine-readable code
// (used by the CLI's JSON error output) and, once it crosses a pipeline
// boundary, the label of the stage that produced it.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

  Error with_stage(std::string stage) const {
    Error e(*this);
    e.stage_ = std::move(stage);
    return e;
  }

 private:
  std::string code_;
  std::string stage_;
};

namespace errc {
inline constexpr const char* kShapeMismatch = "shape_mismatch";
inline constexpr const char* kSampleRateMismatch = "sample_rate_mismatch";
inline constexpr const char* kEmptyInput = "empty_input";
inline constexpr const char* kInvalidArgument = "invalid_argument";
inline constexpr const char* kUnboundedMask = "unbounded_mask";
inline constexpr const char* kDegenerate = "degenerate_configuration";
inline constexpr const char* kUnknownScheme = "unknown_scheme";
inline constexpr const char* kRankDeficient = "rank_deficient";
inline constexpr const char* kLengthMismatch = "length_mismatch";
inline constexpr const char* kSilentInput = "silent_input";
inline constexpr const char* kMissingTeacher = "missing_teacher";
inline constexpr const char* kBadMagic = "bad_magic";
inline constexpr const char* kChecksum = "checksum_mismatch";
inline constexpr const char* kCorruptArchive = "corrupt_archive";
inline constexpr const char* kBind = "bind_error";
inline constexpr const char* kIo = "io_error";
inline constexpr const char* kFormat = "format_error";
}  // namespace errc

}  // namespace vovit
