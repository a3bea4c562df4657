#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "logcave/certificate.hpp"
#include "logcave/errors.hpp"
#include "logcave/sample.hpp"
#include "logcave/solver.hpp"

namespace logcave {

/// Fixed %.12e formatting everywhere, so two runs differ in zero bytes and a
/// re-parse reproduces values to 1 ulp of the serialized precision.
inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

inline std::string fmt(long x) { return std::to_string(x); }
inline std::string fmt(int x) { return std::to_string(x); }

// ---- CSV input -----------------------------------------------------------

/// Single-column numeric CSV, optional header line.
inline std::vector<double> read_csv_column(std::istream& in) {
  std::vector<double> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // strip trailing CR and surrounding blanks
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    std::size_t b = 0;
    while (b < line.size() && line[b] == ' ') ++b;
    line = line.substr(b);
    if (line.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || *end != '\0') {
      if (lineno == 1 && out.empty()) continue; // header
      throw InputFormatError("line " + std::to_string(lineno) +
                                 ": not a number: '" + line + "'",
                             lineno);
    }
    if (!std::isfinite(v))
      throw InputFormatError("line " + std::to_string(lineno) + ": non-finite value",
                             lineno);
    out.push_back(v);
  }
  return out;
}

inline std::vector<double> read_csv_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputFormatError("cannot open input file: " + path);
  return read_csv_column(in);
}

// ---- atomic output ---------------------------------------------------------

/// Write via a temp file and atomic rename; partial outputs never survive.
inline void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

// ---- fit JSON --------------------------------------------------------------

namespace io_detail {

inline void write_array(std::string& s, const std::vector<double>& v) {
  s += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt(v[i]);
  }
  s += ']';
}

inline void write_array(std::string& s, const std::vector<int>& v) {
  s += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  s += ']';
}

inline void write_fit(std::string& s, const Fit& f, const CharacterizationReport& rep) {
  s += "{\"knots\":";
  write_array(s, f.estimate.knots());
  s += ",\"values\":";
  write_array(s, f.estimate.values());
  s += ",\"knot_set\":";
  write_array(s, f.knot_set);
  s += ",\"loglik\":" + fmt(f.loglik);
  s += ",\"psi\":" + fmt(f.psi);
  s += ",\"iterations\":" + fmt(f.iterations);
  s += ",\"max_certificate_violation\":" + fmt(f.max_certificate_violation);
  if (f.mode) s += ",\"mode\":" + fmt(*f.mode);
  s += ",\"certificate\":{";
  s += "\"max_inequality_violation\":" + fmt(rep.max_inequality_violation);
  s += ",\"max_knot_equality_gap\":" + fmt(rep.max_knot_equality_gap);
  s += ",\"touching_violation\":" + fmt(rep.touching_violation);
  s += ",\"normalization_gap\":" + fmt(rep.normalization_gap);
  s += std::string(",\"pass\":") + (rep.pass ? "true" : "false");
  s += "}}";
}

} // namespace io_detail

/// The fit document emitted by the CLI: the unconstrained fit, and when a
/// mode was supplied also the constrained fit plus 2 log lambda_n.
inline std::string fit_document(long n_raw, const Fit& fu,
                                const CharacterizationReport& repu,
                                const Fit* fc = nullptr,
                                const CharacterizationReport* repc = nullptr,
                                std::optional<double> lr = std::nullopt) {
  std::string s = "{\"n_raw\":" + fmt(n_raw) + ",\"unconstrained\":";
  io_detail::write_fit(s, fu, repu);
  if (fc && repc) {
    s += ",\"constrained\":";
    io_detail::write_fit(s, *fc, *repc);
  }
  if (lr) s += ",\"lr\":" + fmt(*lr);
  s += "}\n";
  return s;
}

struct ParsedFit {
  PwlConcave estimate;
  std::optional<double> mode;
};

/// Read one fit entry ("unconstrained" or "constrained") back from JSON.
inline ParsedFit parse_fit_document(const std::string& text, const std::string& which) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputFormatError(std::string("fit JSON parse error: ") + e.what());
  }
  if (!j.contains(which))
    throw InputFormatError("fit JSON has no '" + which + "' entry");
  const auto& e = j.at(which);
  try {
    std::vector<double> knots = e.at("knots").get<std::vector<double>>();
    std::vector<double> values = e.at("values").get<std::vector<double>>();
    ParsedFit out{PwlConcave(std::move(knots), std::move(values)), std::nullopt};
    if (e.contains("mode")) out.mode = e.at("mode").get<double>();
    return out;
  } catch (const nlohmann::json::exception& ex) {
    throw InputFormatError(std::string("fit JSON schema mismatch: ") + ex.what());
  }
}

} // namespace logcave
