#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sqla/dense.hpp"

// SQM1 container: the 4-byte magic "SQM1", u64 rows, u64 cols, then rows * cols float64 values in
// row-major order, all little-endian. Vectors are stored with rows = 1. Several blocks may be
// concatenated in one file.
namespace sqla::io {

void write_sqm(std::ostream& out, const DenseMatrix& m);
DenseMatrix read_sqm(std::istream& in);

/// Plain numeric CSV: one matrix row per line, comma separated; blank lines are skipped.
DenseMatrix read_csv(std::istream& in);
void write_csv(std::ostream& out, const DenseMatrix& m);

void save_matrix(const std::string& path, const DenseMatrix& m);
/// Reads an SQM1 file, or a CSV file when the magic is absent.
DenseMatrix load_matrix(const std::string& path);

void save_blocks(const std::string& path, const std::vector<DenseMatrix>& blocks);
std::vector<DenseMatrix> load_blocks(const std::string& path);

}  // namespace sqla::io
