#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gsum {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad parameters handed to a constructor or operation.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A precondition on the input graph (connectivity, regularity, diameter) failed.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// A protocol tried to use the network in a way the round model forbids.
class ProtocolViolation : public Error {
public:
    ProtocolViolation(const std::string& what, std::size_t round)
        : Error("round " + std::to_string(round) + ": " + what), round_(round) {}

    std::size_t round() const { return round_; }

private:
    std::size_t round_;
};

class NonFiniteError : public Error {
public:
    NonFiniteError(std::size_t round, std::size_t vertex)
        : Error("non-finite value at vertex " + std::to_string(vertex) + " after round " +
                std::to_string(round)),
          round_(round) {}

    std::size_t round() const { return round_; }

private:
    std::size_t round_;
};

}  // namespace gsum
