#include "sqla/sqm_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "sqla/errors.hpp"

namespace sqla::io {

namespace {

constexpr std::array<char, 4> kMagic = {'S', 'Q', 'M', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<unsigned char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b.data()), 8);
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) throw FormatError("SQM1: truncated header");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

}  // namespace

void write_sqm(std::ostream& out, const DenseMatrix& m) {
  out.write(kMagic.data(), 4);
  put_u64(out, m.rows());
  put_u64(out, m.cols());
  for (double x : m.data()) put_u64(out, std::bit_cast<std::uint64_t>(x));
  if (!out) throw FormatError("SQM1: write failed");
}

DenseMatrix read_sqm(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4) || magic != kMagic) throw FormatError("SQM1: bad magic");
  const std::uint64_t rows = get_u64(in);
  const std::uint64_t cols = get_u64(in);
  if (cols != 0 && rows > std::numeric_limits<std::uint64_t>::max() / 8 / cols)
    throw FormatError("SQM1: dimensions overflow");
  std::vector<double> data(rows * cols);
  for (double& x : data) {
    std::uint64_t bits = 0;
    try {
      bits = get_u64(in);
    } catch (const FormatError&) {
      throw FormatError("SQM1: truncated payload");
    }
    x = std::bit_cast<double>(bits);
  }
  return DenseMatrix(rows, cols, std::move(data));
}

DenseMatrix read_csv(std::istream& in) {
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t count = 0;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw FormatError("CSV: non-numeric cell '" + cell + "' on row " + std::to_string(rows + 1));
      }
      if (cell.find_first_not_of(" \t", used) != std::string::npos)
        throw FormatError("CSV: trailing characters in cell '" + cell + "'");
      data.push_back(v);
      ++count;
    }
    if (rows == 0) cols = count;
    if (count != cols) throw FormatError("CSV: ragged row " + std::to_string(rows + 1));
    ++rows;
  }
  if (rows == 0) throw FormatError("CSV: no data");
  return DenseMatrix(rows, cols, std::move(data));
}

void write_csv(std::ostream& out, const DenseMatrix& m) {
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
  out.precision(old);
}

void save_matrix(const std::string& path, const DenseMatrix& m) { save_blocks(path, {m}); }

DenseMatrix load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  const bool is_sqm = in.gcount() == 4 && magic == kMagic;
  in.clear();
  in.seekg(0);
  return is_sqm ? read_sqm(in) : read_csv(in);
}

void save_blocks(const std::string& path, const std::vector<DenseMatrix>& blocks) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path);
  for (const DenseMatrix& b : blocks) write_sqm(out, b);
}

std::vector<DenseMatrix> load_blocks(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::vector<DenseMatrix> blocks;
  while (in.peek() != std::char_traits<char>::eof()) blocks.push_back(read_sqm(in));
  return blocks;
}

}  // namespace sqla::io
