#pragma once

#include <stdexcept>
#include <string>

namespace rbffd {

enum class errc {
    invalid_argument,
    config,
    io,
    singular_stencil,
    ill_conditioned,
    solver_failure,
};

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    errc code() const { return code_; }

private:
    errc code_;
};

} // namespace rbffd
