#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mayleonard/integrator.hpp"

namespace mayleonard::cli {

/// 17 significant digits; reading it back reproduces the double exactly.
std::string format_number(double v);

template <Scalar S>
std::string csv_header();

/// Header, one row per sample, then `# terminated=<kind> t=<time>` when the
/// trajectory ended abnormally, then one `# ` line per entry of `trailer`.
template <Scalar S>
void write_csv(std::ostream& os, const Trajectory<S>& traj,
               const std::vector<std::string>& trailer = {});

template <Scalar S>
nlohmann::json trajectory_to_json(const Trajectory<S>& traj);

/// Parsed CSV trajectory; complex files fill `imag`.
struct CsvTable {
  bool complex = false;
  std::vector<double> times;
  std::vector<std::array<double, 3>> real;
  std::vector<std::array<double, 3>> imag;
  std::vector<std::string> comments;  // without the leading "# "
};

/// Throws std::runtime_error on a header or row it does not recognise.
CsvTable read_csv(std::istream& is);

#define MAYLEONARD_EXTERN_IO(S)                                                              \
  extern template std::string csv_header<S>();                                               \
  extern template void write_csv(std::ostream&, const Trajectory<S>&,                        \
                                 const std::vector<std::string>&);                           \
  extern template nlohmann::json trajectory_to_json(const Trajectory<S>&);

MAYLEONARD_EXTERN_IO(Real)
MAYLEONARD_EXTERN_IO(Complex)
#undef MAYLEONARD_EXTERN_IO

}  // namespace mayleonard::cli
