#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "chcprune/core/syntax.hpp"

namespace chcprune {

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UnsupportedError : public Error {
 public:
  UnsupportedError(const std::string& message, std::size_t clause_index);
  /// Zero-based index of the offending clause.
  std::size_t clause_index() const { return clause_index_; }

 private:
  std::size_t clause_index_;
};

/// Parses Edinburgh-style CLP clauses (`%` comments, `.`-terminated). The
/// result is validated: arities are consistent and `unsafe` is a nullary,
/// head-only predicate.
Program parse_program(std::string_view text);
Program parse_file(const std::filesystem::path& path);

std::string to_string(const Term& t);
std::string to_string(const LinearExpr& e);
std::string to_string(const AtomicConstraint& c);
std::string to_string(const Atom& a);
std::string to_string(const Clause& c);

/// One clause per line; re-parses to the same program.
std::string emit_clp(const Program& p);

struct SmtOptions {
  /// Emit `read`/`write` as `select`/`store` over `(Array Int Int)`.
  bool arrays = false;
};

/// SMT-LIB2 document in logic HORN: one declaration per non-query predicate,
/// one universally closed implication per clause; query clauses imply false.
std::string emit_smtlib_horn(const Program& p, const SmtOptions& options = {});

}  // namespace chcprune
