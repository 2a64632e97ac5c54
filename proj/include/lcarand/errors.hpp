#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lcarand {

// Exact backend would exceed a configured cap; caller should fall back.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::invalid_argument {
public:
    ParseError(const std::string& what, std::size_t pos)
        : std::invalid_argument(what + " at position " + std::to_string(pos)), pos_(pos) {}
    std::size_t position() const noexcept { return pos_; }

private:
    std::size_t pos_;
};

}  // namespace lcarand
