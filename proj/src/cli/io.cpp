#include "mayleonard/cli/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mayleonard/cli/config.hpp"

namespace mayleonard::cli {

namespace {

constexpr std::string_view kRealHeader = "t,x1,x2,x3";
constexpr std::string_view kComplexHeader = "t,re_x1,im_x1,re_x2,im_x2,re_x3,im_x3";

double parse_double(const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("read_csv: bad number '" + field + "'");
  }
  if (used != field.size()) throw std::runtime_error("read_csv: bad number '" + field + "'");
  return v;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <Scalar S>
std::string csv_header() {
  return std::string(is_complex_v<S> ? kComplexHeader : kRealHeader);
}

template <Scalar S>
void write_csv(std::ostream& os, const Trajectory<S>& traj,
               const std::vector<std::string>& trailer) {
  os << csv_header<S>() << '\n';
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    os << format_number(traj.times[i]);
    for (const auto& c : traj.states[i]) {
      if constexpr (is_complex_v<S>)
        os << ',' << format_number(c.real()) << ',' << format_number(c.imag());
      else
        os << ',' << format_number(c);
    }
    os << '\n';
  }
  if (traj.terminated != Termination::Completed)
    os << "# terminated=" << termination_name(traj.terminated)
       << " t=" << format_number(traj.failure_time) << '\n';
  for (const auto& line : trailer) os << "# " << line << '\n';
}

template <Scalar S>
nlohmann::json trajectory_to_json(const Trajectory<S>& traj) {
  nlohmann::json states = nlohmann::json::array();
  for (const auto& x : traj.states) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& c : x) row.push_back(scalar_to_json(c));
    states.push_back(std::move(row));
  }
  nlohmann::json doc = {{"mode", is_complex_v<S> ? "complex" : "real"},
                        {"times", traj.times},
                        {"states", std::move(states)},
                        {"terminated", termination_name(traj.terminated)}};
  if (traj.terminated != Termination::Completed) doc["failure_time"] = traj.failure_time;
  return doc;
}

CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_csv: empty input");
  if (line == kRealHeader)
    table.complex = false;
  else if (line == kComplexHeader)
    table.complex = true;
  else
    throw std::runtime_error("read_csv: unrecognised header '" + line + "'");

  const std::size_t width = table.complex ? 7 : 4;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      table.comments.push_back(line.substr(2));
      continue;
    }
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(parse_double(f));
    if (fields.size() != width) throw std::runtime_error("read_csv: wrong field count");
    table.times.push_back(fields[0]);
    if (table.complex) {
      table.real.push_back({fields[1], fields[3], fields[5]});
      table.imag.push_back({fields[2], fields[4], fields[6]});
    } else {
      table.real.push_back({fields[1], fields[2], fields[3]});
    }
  }
  return table;
}

#define MAYLEONARD_INSTANTIATE_IO(S)                                                        \
  template std::string csv_header<S>();                                                     \
  template void write_csv(std::ostream&, const Trajectory<S>&, const std::vector<std::string>&); \
  template nlohmann::json trajectory_to_json(const Trajectory<S>&);

MAYLEONARD_INSTANTIATE_IO(Real)
MAYLEONARD_INSTANTIATE_IO(Complex)

}  // namespace mayleonard::cli
