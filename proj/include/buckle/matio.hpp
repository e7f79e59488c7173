#pragma once

#include "buckle/common.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace buckle {

struct Triplet {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

/// Symmetric matrix held as assembled lower-triangle triplets
/// (row >= col, sorted column-major, no duplicates).
class SymMatrix {
 public:
  SymMatrix() = default;
  /// Assembles triplets: upper entries are mirrored into the lower
  /// triangle and duplicates are summed.
  SymMatrix(Index n, std::vector<Triplet> entries, std::string name = {});

  static SymMatrix from_dense(const Matrix& a, std::string name = {}, double drop_tol = 0.0);

  Index size() const { return n_; }
  const std::vector<Triplet>& entries() const { return entries_; }
  const std::string& name() const { return name_; }
  Matrix to_dense() const;

 private:
  Index n_ = 0;
  std::vector<Triplet> entries_;
  std::string name_;
};

struct BasisColumns {
  Matrix columns;  // n x k

  Index rows() const { return columns.rows(); }
  Index cols() const { return columns.cols(); }
};

/// Throws RankDeficient when the numerical rank (singular values above
/// rank_tol * sigma_max) is below the column count.
BasisColumns make_basis(Matrix columns, double rank_tol = 1e-10);

struct ProblemBundle {
  SymMatrix k;
  SymMatrix kg;
  BasisColumns zn;
  BasisColumns zc;

  Index size() const { return k.size(); }
};

SymMatrix read_matrix_market(const std::filesystem::path& path);
void write_matrix_market(const SymMatrix& a, const std::filesystem::path& path);

BasisColumns read_basis(const std::filesystem::path& path, Index n, double rank_tol = 1e-10);
void write_basis(const BasisColumns& z, const std::filesystem::path& path);

struct ColumnCheck {
  std::string basis;  // "ZN" or "ZC"
  Index column = 0;
  double k_ratio = 0.0;   // ||K z|| / (||K||_1 ||z||)
  double kg_ratio = 0.0;  // ||KG z|| / (||KG||_1 ||z||), meaningful for ZC
};

struct ValidationReport {
  std::vector<ColumnCheck> columns;
  bool pass = true;
  std::vector<std::string> warnings;
  std::vector<std::string> failures;
};

/// K ratios are held strictly to tau_null; KG ratios on ZC only warn.
ValidationReport validate_bundle(const ProblemBundle& b, double tau_null = 1e-10);

/// Bundle on disk: K.mtx, KG.mtx and optionally ZN.mtx, ZC.mtx in one
/// directory.
ProblemBundle read_bundle(const std::filesystem::path& dir);
void write_bundle(const ProblemBundle& b, const std::filesystem::path& dir);

struct TraceRow {
  Index step = 0;
  double vnorm = 0.0;
  double beta = 0.0;
};

void write_trace(const std::vector<TraceRow>& rows, const std::filesystem::path& path);
std::vector<TraceRow> read_trace(const std::filesystem::path& path);

}  // namespace buckle
