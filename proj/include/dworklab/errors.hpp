#pragma once

#include <stdexcept>
#include <string>

namespace dworklab {

// An analysis declined because its input violates a mathematical precondition.
// The CLI maps this to exit code 1; std::invalid_argument maps to usage errors.
struct Refusal : std::runtime_error {
    explicit Refusal(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dworklab
