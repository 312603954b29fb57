#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "visolve/diagnostics.hpp"
#include "visolve/flow.hpp"

namespace visolve {

inline constexpr const char* kTraceHeader =
    "iter,lambda,rho,residual,dist_ref,step_norm,f_evals,proj_calls,elapsed_ns";

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& tok, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("trace csv: bad ") + what + " field '" + tok + "'");
  }
}

inline long parse_long(const std::string& tok, const char* what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return static_cast<long>(v);
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("trace csv: bad ") + what + " field '" + tok + "'");
  }
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream is(line);
  while (std::getline(is, tok, ',')) out.push_back(tok);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

inline std::string trace_to_csv(const Trace& trace) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const TraceRow& r : trace) {
    out += std::to_string(r.iter);
    out += ',';
    out += detail::fmt_double(r.lambda);
    out += ',';
    out += detail::fmt_double(r.rho);
    out += ',';
    out += detail::fmt_double(r.residual);
    out += ',';
    out += detail::fmt_double(r.dist_ref);
    out += ',';
    out += detail::fmt_double(r.step_norm);
    out += ',';
    out += std::to_string(r.f_evals);
    out += ',';
    out += std::to_string(r.proj_calls);
    out += ',';
    out += std::to_string(r.elapsed_ns);
    out += '\n';
  }
  return out;
}

inline Trace trace_from_csv_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("trace csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader)
    throw std::runtime_error("trace csv: unexpected header '" + line + "'");
  Trace trace;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::split_csv(line);
    if (f.size() != 9)
      throw std::runtime_error("trace csv: expected 9 fields, got " + std::to_string(f.size()));
    TraceRow r;
    r.iter = detail::parse_long(f[0], "iter");
    r.lambda = detail::parse_double(f[1], "lambda");
    r.rho = detail::parse_double(f[2], "rho");
    r.residual = detail::parse_double(f[3], "residual");
    r.dist_ref = detail::parse_double(f[4], "dist_ref");
    r.step_norm = detail::parse_double(f[5], "step_norm");
    r.f_evals = detail::parse_long(f[6], "f_evals");
    r.proj_calls = detail::parse_long(f[7], "proj_calls");
    r.elapsed_ns = detail::parse_long(f[8], "elapsed_ns");
    trace.push_back(r);
  }
  return trace;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline void write_trace_csv(const std::string& path, const Trace& trace) {
  write_file(path, trace_to_csv(trace));
}

inline Trace read_trace_csv(const std::string& path) {
  return trace_from_csv_text(read_file(path));
}

/// Trajectory export: columns t, x_1..x_n, dist_ref, gap. dist_ref is NaN
/// when the trajectory has no reference.
inline std::string trajectory_to_csv(const Trajectory& traj) {
  const Eigen::Index n = traj.states.empty() ? 0 : traj.states.front().size();
  std::string out = "t";
  for (Eigen::Index j = 0; j < n; ++j) out += ",x_" + std::to_string(j + 1);
  out += ",dist_ref,gap\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out += detail::fmt_double(traj.times[k]);
    for (Eigen::Index j = 0; j < n; ++j) {
      out += ',';
      out += detail::fmt_double(traj.states[k][j]);
    }
    out += ',';
    out += k < traj.lyapunov.size() ? detail::fmt_double(std::sqrt(traj.lyapunov[k]))
                                    : std::string("nan");
    out += ',';
    out += detail::fmt_double(traj.gap[k]);
    out += '\n';
  }
  return out;
}

}  // namespace visolve
