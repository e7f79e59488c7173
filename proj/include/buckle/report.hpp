#pragma once

#include "buckle/common.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace buckle {

struct EigenpairRecord {
  double lambda = 0.0;
  double mu = 0.0;
  double eta = 0.0;
  double cos_angle = 0.0;
  double errbound = 0.0;
};

struct CountRecord {
  double a = 0.0;
  double b = 0.0;
  Index count = 0;
  std::string method;
  std::vector<std::pair<double, Index>> inertias;  // (alpha, nu_minus of the factored matrix)
  Index nu_minus_projected = 0;                    // of ZN^T KG ZN
  Index nu_plus_projected = 0;
  Index common_null_dim = 0;
};

inline bool operator==(const EigenpairRecord& a, const EigenpairRecord& b) {
  return a.lambda == b.lambda && a.mu == b.mu && a.eta == b.eta && a.cos_angle == b.cos_angle &&
         a.errbound == b.errbound;
}

inline bool operator==(const CountRecord& a, const CountRecord& b) {
  return a.a == b.a && a.b == b.b && a.count == b.count && a.method == b.method &&
         a.inertias == b.inertias && a.nu_minus_projected == b.nu_minus_projected &&
         a.nu_plus_projected == b.nu_plus_projected && a.common_null_dim == b.common_null_dim;
}

struct SolveReport {
  int schema = 1;
  double sigma = 0.0;
  std::string method;
  Index iterations = 0;
  std::string stop_reason;
  double orthogonality = 0.0;  // ||V^T M V - I||_F at exit
  std::vector<EigenpairRecord> eigenpairs;
  std::optional<CountRecord> count;
  std::optional<std::string> verdict;  // MATCH | MISSING | SURPLUS
  Index verdict_delta = 0;

  friend bool operator==(const SolveReport&, const SolveReport&) = default;
};

/// JSON text of the report (schema 1). Doubles are printed in shortest
/// round-trip form.
std::string report_to_json(const SolveReport& r);
SolveReport report_from_json(const std::string& text);

void write_report(const SolveReport& r, const std::filesystem::path& path);
SolveReport read_report(const std::filesystem::path& path);

std::string count_to_json(const CountRecord& c);

}  // namespace buckle
