#include "gctl/trace_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gctl {

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

namespace {

template <class T>
std::string opt(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_same_v<T, double>) return format_double(*v);
  else return std::to_string(*v);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::runtime_error("csv line " + std::to_string(line) + ": bad number '" + s + "'");
  return x;
}

std::optional<double> parse_opt(const std::string& s, std::size_t line) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, line);
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
  return f;
}

void close_checked(std::ofstream& f, const std::filesystem::path& p) {
  f.close();
  if (!f) throw std::runtime_error("error while writing '" + p.string() + "'");
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << format_double(r.t) << ',' << format_double(r.ref) << ',' << format_double(r.y) << ','
        << format_double(r.e) << ',' << format_double(r.u) << ',' << opt(r.u_arc) << ','
        << opt(r.u_g) << ',' << opt(r.s_h) << ',' << opt(r.rules) << ',' << opt(r.v_hat) << ','
        << opt(r.det_g) << ',' << opt(r.a1) << ',' << opt(r.a2) << ',' << opt(r.a3) << ','
        << r.event << '\n';
  }
}

std::vector<TraceRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::runtime_error("csv: unexpected header '" + line + "'");

  std::vector<TraceRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 15)
      throw std::runtime_error("csv line " + std::to_string(lineno) + ": expected 15 fields");
    TraceRow r;
    r.t = parse_double(f[0], lineno);
    r.ref = parse_double(f[1], lineno);
    r.y = parse_double(f[2], lineno);
    r.e = parse_double(f[3], lineno);
    r.u = parse_double(f[4], lineno);
    r.u_arc = parse_opt(f[5], lineno);
    r.u_g = parse_opt(f[6], lineno);
    r.s_h = parse_opt(f[7], lineno);
    if (!f[8].empty()) r.rules = static_cast<std::size_t>(parse_double(f[8], lineno));
    r.v_hat = parse_opt(f[9], lineno);
    r.det_g = parse_opt(f[10], lineno);
    r.a1 = parse_opt(f[11], lineno);
    r.a2 = parse_opt(f[12], lineno);
    r.a3 = parse_opt(f[13], lineno);
    r.event = f[14];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<TraceRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  try {
    return parse_csv(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_summary(std::ostream& out, const ScenarioResult& result) {
  const Summary& s = result.summary;
  auto opt_or_none = [](const auto& v) {
    const std::string x = opt(v);
    return x.empty() ? std::string("none") : x;
  };
  out << "name = " << result.name << '\n'
      << "status = " << (result.ok() ? "ok" : "diverged") << '\n';
  if (result.failure) out << "failure = " << *result.failure << '\n';
  out << "steps = " << result.rows.size() << '\n'
      << "rmse = " << format_double(s.rmse) << '\n'
      << "rise_time_s = " << opt_or_none(s.rise_time_s) << '\n'
      << "settling_time_s = " << opt_or_none(s.settling_time_s) << '\n'
      << "step_time_s = " << opt_or_none(s.step_time_s) << '\n'
      << "final_rule_count = " << opt_or_none(s.final_rule_count) << '\n'
      << "max_abs_u = " << format_double(s.max_abs_u) << '\n'
      << "gain_resets = " << result.gain_resets << '\n'
      << "lyapunov_increases = " << result.lyapunov_increases << '\n';
}

void write_rule_series(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << "t,rules\n";
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!r.rules) continue;
    if (r.rules != last || i + 1 == rows.size())
      out << format_double(r.t) << ',' << *r.rules << '\n';
    last = r.rules;
  }
}

EmittedFiles emit(const ScenarioResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());

  EmittedFiles files{dir / (result.name + ".csv"), dir / (result.name + ".summary.txt"),
                     dir / (result.name + ".rules.csv")};
  {
    auto f = open_out(files.csv);
    write_csv(f, result.rows);
    close_checked(f, files.csv);
  }
  {
    auto f = open_out(files.summary);
    write_summary(f, result);
    close_checked(f, files.summary);
  }
  {
    auto f = open_out(files.rules);
    write_rule_series(f, result.rows);
    close_checked(f, files.rules);
  }
  return files;
}

}  // namespace gctl
