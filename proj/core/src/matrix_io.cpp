#include "fsat/matrix_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "fsat/error.hpp"

namespace fsat::io {
namespace {

constexpr std::array<char, 4> kMagic{'F', 'S', 'M', '1'};

template <class UInt>
void put_le(std::ostream& out, UInt v) {
  std::array<char, sizeof(UInt)> bytes{};
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  }
  out.write(bytes.data(), bytes.size());
}

template <class UInt>
UInt get_le(std::istream& in) {
  std::array<unsigned char, sizeof(UInt)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw Error(ErrorKind::IoError, "read_matrix_binary: truncated stream");
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void write_matrix_binary(std::ostream& out, const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "write_matrix_binary: matrix must be square");
  }
  out.write(kMagic.data(), kMagic.size());
  put_le(out, static_cast<std::uint32_t>(m.rows()));
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      put_le(out, std::bit_cast<std::uint64_t>(m(r, c).real()));
      put_le(out, std::bit_cast<std::uint64_t>(m(r, c).imag()));
    }
  }
  if (!out) throw Error(ErrorKind::IoError, "write_matrix_binary: write failed");
}

ComplexMatrix read_matrix_binary(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error(ErrorKind::IoError, "read_matrix_binary: bad magic");
  const auto dim = static_cast<Index>(get_le<std::uint32_t>(in));
  ComplexMatrix m(dim, dim);
  for (Index r = 0; r < dim; ++r) {
    for (Index c = 0; c < dim; ++c) {
      const double re = std::bit_cast<double>(get_le<std::uint64_t>(in));
      const double im = std::bit_cast<double>(get_le<std::uint64_t>(in));
      m(r, c) = Complex(re, im);
    }
  }
  return m;
}

void save_matrix(const std::filesystem::path& path, const ComplexMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "save_matrix: cannot open " + path.string());
  write_matrix_binary(out, m);
}

ComplexMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "load_matrix: cannot open " + path.string());
  return read_matrix_binary(in);
}

std::string matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) entries.push_back({m(r, c).real(), m(r, c).imag()});
  }
  nlohmann::json j{{"dim", m.rows()}, {"entries", std::move(entries)}};
  return j.dump();
}

ComplexMatrix matrix_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("matrix_from_json: ") + e.what());
  }
  const auto dim = j.at("dim").get<Index>();
  const auto& entries = j.at("entries");
  if (dim < 1 || entries.size() != static_cast<std::size_t>(dim * dim)) {
    throw Error(ErrorKind::DimensionMismatch, "matrix_from_json: entry count does not match dim^2");
  }
  ComplexMatrix m(dim, dim);
  std::size_t k = 0;
  for (Index r = 0; r < dim; ++r) {
    for (Index c = 0; c < dim; ++c, ++k) {
      m(r, c) = Complex(entries[k].at(0).get<double>(), entries[k].at(1).get<double>());
    }
  }
  return m;
}

}  // namespace fsat::io
