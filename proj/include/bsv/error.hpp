#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bsv {

enum class Errc {
    empty_input,
    format_error,
    ambiguous_surface,
    syntax_error,
    duplicate_rule,
    mismatched_itemset,
    inconsistent_inputs,
    io_error,
    invalid_query,
    unknown_region,
};

std::string_view errc_name(Errc code) noexcept;

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    /// line is 1-based; 0 means "not tied to a line".
    Error(Errc code, const std::string& message, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + message),
          code_(code),
          line_(line) {}

    Errc code() const noexcept { return code_; }
    std::size_t line() const noexcept { return line_; }

private:
    Errc code_;
    std::size_t line_ = 0;
};

}  // namespace bsv
