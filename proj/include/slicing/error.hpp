#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slicing {

enum class ErrorKind {
    InvalidConfig,
    PlacementInfeasible,
    DimensionMismatch,
    InfeasibleMinRate,
    TooLarge,
    IllegalTransition,
    IllegalActor,
    TerminalState,
    Io,
};

std::string_view error_name(ErrorKind kind);

// Domain error. The CLI prints name() verbatim on standard error.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);

    ErrorKind kind() const noexcept { return kind_; }
    std::string_view name() const noexcept { return error_name(kind_); }

private:
    ErrorKind kind_;
};

}  // namespace slicing
