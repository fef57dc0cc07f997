#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace reoh {

// Domain error with a stable machine-readable name (e.g. "AlphabetOverlap").
// The CLI maps these to exit code 1 and prints the name.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

[[noreturn]] inline void fail(std::string name, const std::string& what) {
    throw Error(std::move(name), what);
}

} // namespace reoh
