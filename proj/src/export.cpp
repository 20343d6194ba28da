#include "export.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace bds::io {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string columns_csv(const std::vector<std::string>& names, const std::vector<std::vector<double>>& columns,
                        const std::string& index_name) {
  std::string out;
  if (!index_name.empty()) out += index_name;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0 || !index_name.empty()) out += ',';
    out += names[i];
  }
  out += '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    if (!index_name.empty()) out += std::to_string(r);
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i > 0 || !index_name.empty()) out += ',';
      out += format_number(columns[i][r]);
    }
    out += '\n';
  }
  return out;
}

std::string distribution_csv(const chain::Distribution& dist) { return columns_csv({"value"}, {dist.values}); }

std::string matrix_csv(const Matrix& m) {
  std::string out = "x";
  for (std::size_t y = 0; y < m.cols(); ++y) out += ',' + std::to_string(y);
  out += '\n';
  for (std::size_t x = 0; x < m.rows(); ++x) {
    out += std::to_string(x);
    for (std::size_t y = 0; y < m.cols(); ++y) out += ',' + format_number(m(x, y));
    out += '\n';
  }
  return out;
}

nlohmann::json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

nlohmann::json to_json(const oracle::ChiSquare& chi) {
  return {{"statistic", number_json(chi.statistic)}, {"dof", chi.dof}, {"p_value", chi.p_value}};
}

nlohmann::json to_json(const oracle::OracleReport& r) {
  nlohmann::json j = {{"max_abs_err", number_json(r.max_abs_err)},
                      {"max_rel_err", number_json(r.max_rel_err)},
                      {"tail_bound_used", number_json(r.tail_bound_used)},
                      {"spectra", {{"closed_form", r.spectrum_closed}, {"numeric", r.spectrum_numeric}}}};
  j["chi_square"] = r.chi_square ? to_json(*r.chi_square) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const chain::Distribution& d) {
  return {{"values", d.values},
          {"tail_mass", d.tail_mass},
          {"total", d.total()},
          {"negative_probability", d.negative_probability}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, path, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Io, path, "failed reading '" + path + "'");
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, path, "cannot open '" + path + "' for writing");
  out << content;
  out.close();
  if (!out) throw Error(ErrorKind::Io, path, "failed writing '" + path + "'");
}

chain::Distribution read_distribution_csv(const std::string& path, std::size_t points) {
  std::istringstream in(read_file(path));
  chain::Distribution d;
  d.values.assign(points, 0.0);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw Error(ErrorKind::Config, path + ":" + std::to_string(lineno), "expected 'x,value'");
    const std::string xs = line.substr(0, comma), vs = line.substr(comma + 1);
    long x = 0;
    double v = 0.0;
    const auto rx = std::from_chars(xs.data(), xs.data() + xs.size(), x);
    const auto rv = std::from_chars(vs.data(), vs.data() + vs.size(), v);
    if (rx.ec != std::errc() || rv.ec != std::errc()) {
      if (lineno == 1) continue;  // header
      throw Error(ErrorKind::Config, path + ":" + std::to_string(lineno), "unparsable row '" + line + "'");
    }
    if (x < 0 || static_cast<std::size_t>(x) >= points)
      throw Error(ErrorKind::Lattice, "x=" + std::to_string(x), "initial distribution point outside the lattice");
    if (v < 0.0) throw Error(ErrorKind::Param, "x=" + std::to_string(x), "negative probability in initial distribution");
    d.values[static_cast<std::size_t>(x)] += v;
  }
  if (std::fabs(d.total() - 1.0) > 1e-10)
    throw Error(ErrorKind::Param, path, "initial distribution does not sum to 1");
  return d;
}

}  // namespace bds::io
