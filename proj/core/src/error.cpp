// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#include "sentiview/error.hpp"

namespace sentiview {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::io: return "io";
    case ErrorCode::data: return "data";
    case ErrorCode::empty_query: return "empty_query";
    case ErrorCode::unknown_kind: return "unknown_kind";
    case ErrorCode::bad_event: return "bad_event";
    case ErrorCode::sequencing: return "sequencing";
    case ErrorCode::incomplete_task: return "incomplete_task";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::no_data: return "no_data";
    case ErrorCode::insufficient_users: return "insufficient_users";
    }
    return "unknown";
}

}  // namespace sentiview
