#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfem {

/// Bad user input: malformed decks, invalid parameters, inconsistent models.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input-deck syntax or consistency error located at a 1-based line.
class ParseError : public InputError {
public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Degenerate or invalid geometry (zero-measure cells, points outside an element, ...).
class GeometryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Linear solver breakdown or failure to meet the residual contract.
class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, std::vector<double> residual_history)
      : std::runtime_error(what), history_(std::move(residual_history)) {}

  const std::vector<double>& residual_history() const noexcept { return history_; }

private:
  std::vector<double> history_;
};

}  // namespace sfem
