#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curvetree {

// Error categories, chosen so the CLI can map them to exit codes:
// usage/parse problems -> 1, geometry/numeric failures -> 2.
enum class ErrorKind { usage, parse, geometry, numeric, io };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& message)
        : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

    ErrorKind kind() const { return kind_; }
    const std::string& code() const { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

// Syntax error in a polynomial expression; carries the byte offset of the
// first offending character.
class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& message)
        : Error(ErrorKind::parse, "SyntaxError",
                message + " (at offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

#define CURVETREE_DEFINE_ERROR(Name, Kind)                       \
    class Name : public Error {                                  \
    public:                                                      \
        explicit Name(const std::string& message)                \
            : Error(ErrorKind::Kind, #Name, message) {}          \
    };

CURVETREE_DEFINE_ERROR(UnknownIdentifier, parse)
CURVETREE_DEFINE_ERROR(ExponentOverflow, parse)
CURVETREE_DEFINE_ERROR(DegenerateInput, usage)
CURVETREE_DEFINE_ERROR(NotAStrictMinimum, geometry)
CURVETREE_DEFINE_ERROR(NotACriticalPoint, geometry)
CURVETREE_DEFINE_ERROR(NoValidRadius, geometry)
CURVETREE_DEFINE_ERROR(LevelEscapesNeighbourhood, geometry)
CURVETREE_DEFINE_ERROR(NoComponentAroundOrigin, geometry)
CURVETREE_DEFINE_ERROR(RefinementDiverged, numeric)
CURVETREE_DEFINE_ERROR(ConstantInY, geometry)
CURVETREE_DEFINE_ERROR(PolarContainsProjection, geometry)
CURVETREE_DEFINE_ERROR(BranchSelfCrossing, geometry)
CURVETREE_DEFINE_ERROR(SeedDetectionFailed, numeric)
CURVETREE_DEFINE_ERROR(NewtonDiverged, numeric)
CURVETREE_DEFINE_ERROR(EventMismatch, numeric)
CURVETREE_DEFINE_ERROR(BelowNumericFloor, usage)
CURVETREE_DEFINE_ERROR(Unrooted, usage)
CURVETREE_DEFINE_ERROR(EmptyInput, usage)
CURVETREE_DEFINE_ERROR(IoError, io)

#undef CURVETREE_DEFINE_ERROR

} // namespace curvetree
