#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

// Experiment driver behind the `sqla` executable. Exit codes: 0 when the pass-rate threshold is
// met, 1 on a tolerance failure, 2 on usage, format or IO errors.
namespace sqla::harness {

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Least-squares slope of log y against log x over points with x, y > 0.
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// RFC-4180 field: quoted when it contains a comma, quote or line break.
std::string csv_field(const std::string& s);
/// %.17g
std::string format_double(double v);

}  // namespace sqla::harness
