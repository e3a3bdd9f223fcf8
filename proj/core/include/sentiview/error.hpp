// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sentiview {

/// Machine-readable category of a failure. The service maps these onto HTTP
/// status codes and the CLI onto exit codes.
enum class ErrorCode {
    invalid_argument,
    io,
    data,
    empty_query,
    unknown_kind,
    bad_event,
    sequencing,
    incomplete_task,
    degenerate,
    no_data,
    insufficient_users,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), m_code(code)
    {}

    [[nodiscard]] ErrorCode code() const noexcept { return m_code; }

  private:
    ErrorCode m_code;
};

}  // namespace sentiview
