#include "slicing/error.hpp"

namespace slicing {

std::string_view error_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::PlacementInfeasible: return "PlacementInfeasible";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::InfeasibleMinRate: return "InfeasibleMinRate";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::IllegalTransition: return "IllegalTransition";
        case ErrorKind::IllegalActor: return "IllegalActor";
        case ErrorKind::TerminalState: return "TerminalState";
        case ErrorKind::Io: return "IoError";
    }
    return "UnknownError";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}

}  // namespace slicing
