#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ncmatch {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Contraction preconditions.
class DisconnectedSetError : public Error { public: using Error::Error; };
class EvenSetError : public Error { public: using Error::Error; };
class OverlappingSetsError : public Error { public: using Error::Error; };

// Oracle-primitive preconditions.
class NoPerfectMatchingInputError : public Error { public: using Error::Error; };
class NoWitnessError : public Error { public: using Error::Error; };
class OracleError : public Error { public: using Error::Error; };

// Dual computation.
class NotLaminarError : public Error { public: using Error::Error; };
class EvenComponentAtThresholdError : public Error { public: using Error::Error; };

// Main loop.
class NoProgressError : public Error { public: using Error::Error; };

// Walks and structural routines.
class InvalidWalkError : public Error { public: using Error::Error; };
class OddTokensError : public Error { public: using Error::Error; };
class LemmaViolationError : public Error { public: using Error::Error; };

class WeightCapError : public Error { public: using Error::Error; };

class ParseError : public Error {
public:
    ParseError(std::string message, int line, int column)
        : Error("parse error at " + std::to_string(line) + ":" + std::to_string(column) +
                ": " + std::move(message)),
          line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace ncmatch
