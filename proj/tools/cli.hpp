// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vovit::cli {

// Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 failed check
// (gradcheck). Failures print one JSON object on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vovit::cli
