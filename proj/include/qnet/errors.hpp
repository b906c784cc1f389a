#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qnet {

// Root of every error the library raises. Callers that only care about
// success/failure can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeError : public Error { public: using Error::Error; };
class IndexError : public Error { public: using Error::Error; };
class InvalidRotation : public Error { public: using Error::Error; };
class UnstableStep : public Error { public: using Error::Error; };
class InvalidTemperature : public Error { public: using Error::Error; };
class InvalidSchedule : public Error { public: using Error::Error; };

// memory
class PersistenceFailure : public Error {
public:
    PersistenceFailure(const std::string& what, double fidelity, double persistence)
        : Error(what), fidelity_(fidelity), persistence_(persistence) {}
    double fidelity() const noexcept { return fidelity_; }
    double persistence() const noexcept { return persistence_; }

private:
    double fidelity_;
    double persistence_;
};
class EmptyStore : public Error { public: using Error::Error; };
class BelowThreshold : public Error { public: using Error::Error; };
class Ambiguous : public Error { public: using Error::Error; };

// configuration and file formats
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    ValidationError(std::string key, const std::string& constraint)
        : Error(key + ": " + constraint), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class UnknownKey : public Error {
public:
    explicit UnknownKey(std::string key)
        : Error("unknown key '" + key + "'"), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class BadHeader : public Error { public: using Error::Error; };
class BadDimensions : public Error { public: using Error::Error; };

class BadCharacter : public Error {
public:
    BadCharacter(std::size_t line, std::size_t column, char ch)
        : Error("unexpected character '" + std::string(1, ch) + "' at line " +
                std::to_string(line) + ", column " + std::to_string(column)),
          line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace qnet
