#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace tln {

inline constexpr int kMaxDim = 3;

using Point = std::array<double, kMaxDim>;

enum class ErrorKind {
    InvalidDomain,
    InfeasibleConstant,
    Lookup,
    Capability,
    IncompleteInput,
    Resolution,
    Spec,
    Degenerate,
    Coverage,
    Conditioning,
    Covering,
    BiLipschitz,
    Convergence,
    Config,
    Io,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}
