#ifndef LESC_ERRORS_HPP
#define LESC_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lesc {

/// Invalid shapes, out-of-range parameters, malformed requests.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative numerical kernel failed (SVD non-convergence, non-SPD solve).
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, std::size_t iterations)
        : std::runtime_error(what + " (after " + std::to_string(iterations) + " iterations)"),
          iterations_(iterations) {}

    [[nodiscard]] std::size_t iterations() const noexcept { return iterations_; }

private:
    std::size_t iterations_;
};

/// Malformed input file. Line numbers are 1-based; 0 means "whole file".
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace lesc

#endif // LESC_ERRORS_HPP
