#pragma once

#include <stdexcept>
#include <string>

namespace qpcalc {

// Error taxonomy shared by the algebra kernel, the bracket engine and the
// model front end.  Every failure mode carries a kind so callers can react
// without string matching.
enum class ErrorKind {
    UnknownCoordinate,
    ChartMismatch,
    DegreeMismatch,
    MissingDerivativeClosure,
    WrongChartDegree,
    SingularD,
    SyntaxError,
    UndeclaredIdentifier,
    IndexOutOfRange,
    InvalidArgument,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
    throw Error(kind, msg);
}

} // namespace qpcalc
