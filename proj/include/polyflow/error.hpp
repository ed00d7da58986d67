#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polyflow {

enum class Errc {
    DegenerateClass,
    NotClosed,
    NonSimple,
    ZeroEdge,
    NotCCW,
    EdgeCollapse,
    ClassMismatch,
    SingularFieldOnEdge,
    GeometryViolation,
    NoDeclaredMu,
    InvalidBall,
    ResultInvalid,
    MidpointInvalid,
    FixedPointDivergence,
    ReferenceUnavailable,
    InvalidPolygon,
    Config,
    IOFailure,
};

constexpr std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::DegenerateClass: return "DegenerateClass";
        case Errc::NotClosed: return "NotClosed";
        case Errc::NonSimple: return "NonSimple";
        case Errc::ZeroEdge: return "ZeroEdge";
        case Errc::NotCCW: return "NotCCW";
        case Errc::EdgeCollapse: return "EdgeCollapse";
        case Errc::ClassMismatch: return "ClassMismatch";
        case Errc::SingularFieldOnEdge: return "SingularFieldOnEdge";
        case Errc::GeometryViolation: return "GeometryViolation";
        case Errc::NoDeclaredMu: return "NoDeclaredMu";
        case Errc::InvalidBall: return "InvalidBall";
        case Errc::ResultInvalid: return "ResultInvalid";
        case Errc::MidpointInvalid: return "MidpointInvalid";
        case Errc::FixedPointDivergence: return "FixedPointDivergence";
        case Errc::ReferenceUnavailable: return "ReferenceUnavailable";
        case Errc::InvalidPolygon: return "InvalidPolygon";
        case Errc::Config: return "Config";
        case Errc::IOFailure: return "IOFailure";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace polyflow
