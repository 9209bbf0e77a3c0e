#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace momentlab {

// Base of every error thrown by the library. Subclasses name the failed
// precondition; catch `Error` to handle all of them.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define MOMENTLAB_SIMPLE_ERROR(Name)                 \
    class Name : public Error {                      \
    public:                                          \
        explicit Name(const std::string& what)       \
            : Error(std::string(#Name ": ") + what)  \
        {}                                           \
    }

MOMENTLAB_SIMPLE_ERROR(NonPositiveParameter);
MOMENTLAB_SIMPLE_ERROR(DuplicateAtom);
MOMENTLAB_SIMPLE_ERROR(NotNormalized);
MOMENTLAB_SIMPLE_ERROR(AsymmetricInput);
MOMENTLAB_SIMPLE_ERROR(NegativeWeight);
MOMENTLAB_SIMPLE_ERROR(TailTooHeavy);
MOMENTLAB_SIMPLE_ERROR(RegimeError);
MOMENTLAB_SIMPLE_ERROR(EpsilonOutOfRange);
MOMENTLAB_SIMPLE_ERROR(UnboundedProbe);
MOMENTLAB_SIMPLE_ERROR(RejectionInefficiency);
MOMENTLAB_SIMPLE_ERROR(ChannelMismatch);
MOMENTLAB_SIMPLE_ERROR(InvariantViolation);
MOMENTLAB_SIMPLE_ERROR(InvalidArgument);

#undef MOMENTLAB_SIMPLE_ERROR

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, const std::string& expected, const std::string& field = {})
        : Error("SyntaxError " + (field.empty() ? std::string() : "in " + field + " ") + "at position " +
                std::to_string(position) + ": expected " + expected),
          position_(position), expected_(expected), field_(field)
    {}

    // 1-based character position of the offending token.
    std::size_t position() const noexcept { return position_; }
    const std::string& expected() const noexcept { return expected_; }
    // Model-file field the expression came from, if any.
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t position_;
    std::string expected_;
    std::string field_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& subexpression)
        : Error("DomainError: " + subexpression + " is undefined at this point"),
          subexpression_(subexpression)
    {}

    const std::string& subexpression() const noexcept { return subexpression_; }

private:
    std::string subexpression_;
};

class SchemaError : public Error {
public:
    SchemaError(const std::string& path, const std::string& message)
        : Error("SchemaError at " + (path.empty() ? std::string(".") : path) + ": " + message),
          path_(path.empty() ? std::string(".") : path)
    {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class ToleranceNotMet : public Error {
public:
    ToleranceNotMet(const std::string& what, double achieved)
        : Error("ToleranceNotMet: " + what + " (achieved error " + std::to_string(achieved) + ")"),
          achieved_(achieved)
    {}

    double achieved_error() const noexcept { return achieved_; }

private:
    double achieved_;
};

} // namespace momentlab
