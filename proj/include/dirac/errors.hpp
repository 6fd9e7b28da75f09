#pragma once

#include <stdexcept>
#include <string>

namespace dirac {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error { using Error::Error; };
class StructureError : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class PreconditionError : public Error { using Error::Error; };
class RangeError : public Error { using Error::Error; };
class EnumerationError : public Error { using Error::Error; };
class RootError : public Error { using Error::Error; };
class TrackingError : public Error { using Error::Error; };
class FitError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };

/// Non-finite state while integrating; `where` is the x of the first bad node.
class OverflowError : public Error {
public:
    OverflowError(const std::string& what, double where) : Error(what), where_(where) {}
    double where() const noexcept { return where_; }

private:
    double where_;
};

/// Rank-one transform denominator fell below the admissible floor.
class SingularityError : public Error {
public:
    SingularityError(const std::string& what, double where) : Error(what), where_(where) {}
    double where() const noexcept { return where_; }

private:
    double where_;
};

}  // namespace dirac
