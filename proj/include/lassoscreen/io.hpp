#pragma once

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lassoscreen/core.hpp"
#include "lassoscreen/experiments.hpp"
#include "lassoscreen/solver.hpp"
#include "lassoscreen/version.hpp"

namespace lassoscreen {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Deterministic number formatting
// ---------------------------------------------------------------------------

/// 17 significant digits: enough to round-trip any double exactly, with '.'
/// as the decimal separator regardless of locale.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), res.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::runtime_error("parse_double: invalid number '" + s + "'");
  return v;
}

// ---------------------------------------------------------------------------
// Dense matrix text format: first line "rows cols", then one whitespace-
// separated row per line.
// ---------------------------------------------------------------------------

inline void write_matrix_text(const std::filesystem::path& path, const Matrix& M) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_matrix_text: cannot open " + path.string());
  out << M.rows() << ' ' << M.cols() << '\n';
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(M(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_matrix_text: write failed for " + path.string());
}

inline Matrix read_matrix_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_matrix_text: cannot open " + path.string());
  long long rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1)
    throw std::runtime_error("read_matrix_text: bad header in " + path.string());
  Matrix M(rows, cols);
  for (long long i = 0; i < rows; ++i)
    for (long long j = 0; j < cols; ++j)
      if (!(in >> M(i, j)))
        throw std::runtime_error("read_matrix_text: truncated data in " + path.string());
  return M;
}

/// Read a vector stored as an r x 1 or 1 x c matrix.
inline Vector read_vector_text(const std::filesystem::path& path) {
  const Matrix M = read_matrix_text(path);
  if (M.cols() == 1) return M.col(0);
  if (M.rows() == 1) return M.row(0).transpose();
  throw std::runtime_error("read_vector_text: " + path.string() + " is not a vector");
}

// ---------------------------------------------------------------------------
// Digests and manifest
// ---------------------------------------------------------------------------

inline std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("sha256_file: cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("sha256_file: EVP context allocation failed");
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 65536> buf{};
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const std::streamsize got = in.gcount();
    if (got > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(got));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest.data(), &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  hex.reserve(2 * len);
  static const char* kHex = "0123456789abcdef";
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

inline std::string iso8601_utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf.data());
}

/// Provenance record emitted next to every command's outputs: tool version,
/// the full resolved configuration (loadable back through --config to
/// reproduce the run), the seed, a timestamp, and a SHA-256 digest of each
/// output file. Everything except the timestamp is a pure function of the
/// configuration.
inline void write_run_manifest(const std::filesystem::path& out_dir, const std::string& command,
                               const json& resolved_config, std::uint64_t seed,
                               const std::vector<std::string>& output_files) {
  json manifest;
  manifest["tool"] = kToolName;
  manifest["version"] = kToolVersion;
  manifest["command"] = command;
  manifest["config"] = resolved_config;
  manifest["seed"] = seed;
  manifest["timestamp"] = iso8601_utc_now();
  json digests = json::object();
  for (const std::string& f : output_files) digests[f] = "sha256:" + sha256_file(out_dir / f);
  manifest["outputs"] = digests;
  std::ofstream out(out_dir / "run_manifest.json");
  if (!out) throw std::runtime_error("write_run_manifest: cannot open manifest for writing");
  out << manifest.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Result writers
// ---------------------------------------------------------------------------

inline void write_trace_csv(const std::filesystem::path& path, const SolverTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path.string());
  out << "iteration,gap,alive,flops\n";
  for (const TraceEntry& e : trace.entries)
    out << e.iteration << ',' << format_double(e.gap) << ',' << e.alive << ',' << e.flops << '\n';
  if (!out) throw std::runtime_error("write_trace_csv: write failed");
}

inline json solve_result_json(const SolverTrace& trace) {
  json x_nonzeros = json::array();
  for (Index i = 0; i < trace.x.size(); ++i)
    if (trace.x[i] != 0.0) x_nonzeros.push_back(json::array({i, trace.x[i]}));
  json result;
  result["x_nonzeros"] = x_nonzeros;
  result["final_gap"] = trace.final_gap;
  result["iterations"] = trace.iterations;
  result["flops"] = trace.flops;
  result["screened_counts_per_iteration"] = trace.screened_per_iteration;
  result["termination_reason"] = to_string(trace.termination_reason);
  return result;
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_json_file: cannot open " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write_json_file: write failed");
}

/// radius_ratio.csv rows; cells with no counted trials leave mean_ratio empty
/// (explicitly missing rather than imputed).
inline void write_radius_ratio_csv(const std::filesystem::path& path,
                                   const std::vector<std::pair<DictionaryKind, RadiusRatioCell>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_radius_ratio_csv: cannot open " + path.string());
  out << "dict,lambda_ratio,gap_checkpoint,mean_ratio,trials_counted\n";
  for (const auto& [dict, cell] : rows) {
    out << to_string(dict) << ',' << format_double(cell.lambda_ratio) << ','
        << format_double(cell.gap_checkpoint) << ','
        << (cell.trials_counted > 0 ? format_double(cell.mean_ratio) : std::string{}) << ','
        << cell.trials_counted << '\n';
  }
  if (!out) throw std::runtime_error("write_radius_ratio_csv: write failed");
}

struct ProfileRow {
  DictionaryKind dict;
  double lambda_ratio;
  RegionKind region;
  double tau;
  double rho;
};

inline void write_profiles_csv(const std::filesystem::path& path,
                               const std::vector<ProfileRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_profiles_csv: cannot open " + path.string());
  out << "dict,lambda_ratio,region,tau,rho\n";
  for (const ProfileRow& r : rows) {
    out << to_string(r.dict) << ',' << format_double(r.lambda_ratio) << ',' << to_string(r.region)
        << ',' << format_double(r.tau) << ',' << format_double(r.rho) << '\n';
  }
  if (!out) throw std::runtime_error("write_profiles_csv: write failed");
}

}  // namespace lassoscreen
