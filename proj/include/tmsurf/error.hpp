#pragma once

#include <stdexcept>
#include <string>

namespace tmsurf {

// Error taxonomy shared by every layer. CLI maps these onto exit codes.
enum class ErrKind {
    Usage,              // precondition violated by the caller
    Parse,              // DSL or spec-file syntax error
    DivisionByZeroJet,  // divisor vanishes through the full jet order
    InsufficientOrder,  // cancellation or derivation consumed all orders
    Domain,             // kernel evaluated outside its natural domain
    Nullity,            // curve failed the null check
    Finiteness,         // g1/g2 not finite where required
    Numeric,            // quadrature or iteration failed to converge
    NotSingular,        // point is regular
};

class Error : public std::runtime_error {
public:
    Error(ErrKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrKind kind() const { return kind_; }

private:
    ErrKind kind_;
};

// Parse errors carry the byte offset and the tokens that would have been accepted.
class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& expected, const std::string& msg)
        : Error(ErrKind::Parse, msg), offset_(offset), expected_(expected) {}

    std::size_t offset() const { return offset_; }
    const std::string& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::string expected_;
};

} // namespace tmsurf
