// error.hpp - error kinds shared by every opk module

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace opk {

enum class ErrorKind {
    NotHermitian,
    DidNotConverge,
    NotPSD,
    EmptyInput,
    DimensionMismatch,
    EmptyBatch,
    NotPOVM,
    NotDensity,
    SingularSystem,
    MissingOmegaPoint,
    InvalidArgument,
    Parse,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::DidNotConverge: return "DidNotConverge";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyBatch: return "EmptyBatch";
    case ErrorKind::NotPOVM: return "NotPOVM";
    case ErrorKind::NotDensity: return "NotDensity";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::MissingOmegaPoint: return "MissingOmegaPoint";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
    }
    return "Unknown";
}

} // namespace opk
