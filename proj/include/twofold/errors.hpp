#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace twofold {

/// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A point left the domain where a coordinate change is defined.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ExpressionError : public std::runtime_error {
public:
    enum class Kind { Syntax, UnknownIdentifier, NumberRange };

    ExpressionError(Kind kind, std::size_t position, const std::string& message)
        : std::runtime_error(message + " at position " + std::to_string(position)),
          kind_(kind),
          position_(position) {}

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t position() const noexcept { return position_; }

private:
    Kind kind_;
    std::size_t position_;
};

class SingularityError : public std::runtime_error {
public:
    enum class Kind { AlphaZero, BoundarySingularity, PrefactorSingular };

    SingularityError(Kind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Config document does not match the schema; `pointer()` is a JSON pointer.
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string pointer, const std::string& message)
        : std::runtime_error(pointer + ": " + message), pointer_(std::move(pointer)) {}

    [[nodiscard]] const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

}  // namespace twofold
