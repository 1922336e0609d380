#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "fsat/linalg.hpp"

namespace fsat::io {

// Binary layout: "FSM1", dim as little-endian uint32, then dim*dim (re, im)
// pairs of little-endian IEEE-754 doubles in row-major order.
void write_matrix_binary(std::ostream& out, const ComplexMatrix& m);
ComplexMatrix read_matrix_binary(std::istream& in);

void save_matrix(const std::filesystem::path& path, const ComplexMatrix& m);
ComplexMatrix load_matrix(const std::filesystem::path& path);

// JSON for small fixtures: {"dim": N, "entries": [[re, im], ...]} row-major.
std::string matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const std::string& text);

/// File-backed cache of generated operators. Keys are free-form strings such
/// as "CUE-N256-seed7"; the file name is derived from the key verbatim.
class OperatorCache {
 public:
  explicit OperatorCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  template <class Build>
  ComplexMatrix get_or_build(const std::string& key, Build&& build) {
    const auto path = dir_ / (key + ".fsm");
    if (std::filesystem::exists(path)) return load_matrix(path);
    ComplexMatrix m = build();
    std::filesystem::create_directories(dir_);
    save_matrix(path, m);
    return m;
  }

 private:
  std::filesystem::path dir_;
};

}  // namespace fsat::io
