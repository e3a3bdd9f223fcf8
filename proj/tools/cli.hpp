// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sentiview::cli {

/// Exit statuses: 0 ok, 1 usage, 2 data error.
enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2 };

/// Runs one `sentiview` command line (args exclude the program name). Data
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// FNV-1a over the file contents; keys the on-disk index cache.
std::uint64_t file_fingerprint(const std::filesystem::path& path);

}  // namespace sentiview::cli
