#include "buckle/matio.hpp"

#include "buckle/dense_core.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <fstream>
#include <sstream>

namespace buckle {

namespace fs = std::filesystem;

SymMatrix::SymMatrix(Index n, std::vector<Triplet> entries, std::string name)
    : n_(n), name_(std::move(name)) {
  for (auto& t : entries) {
    if (t.row < 0 || t.col < 0 || t.row >= n || t.col >= n) {
      throw Error(ErrorKind::Dimension, "SymMatrix: index out of bounds");
    }
    if (t.row < t.col) std::swap(t.row, t.col);
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  for (const auto& t : entries) {
    if (!entries_.empty() && entries_.back().row == t.row && entries_.back().col == t.col) {
      entries_.back().value += t.value;
    } else {
      entries_.push_back(t);
    }
  }
}

SymMatrix SymMatrix::from_dense(const Matrix& a, std::string name, double drop_tol) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::Dimension, "from_dense: not square");
  std::vector<Triplet> t;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = j; i < a.rows(); ++i) {
      if (std::abs(a(i, j)) > drop_tol) t.push_back({i, j, a(i, j)});
    }
  }
  return SymMatrix(a.rows(), std::move(t), std::move(name));
}

Matrix SymMatrix::to_dense() const {
  Matrix a = Matrix::Zero(n_, n_);
  for (const auto& t : entries_) {
    a(t.row, t.col) = t.value;
    a(t.col, t.row) = t.value;
  }
  return a;
}

BasisColumns make_basis(Matrix columns, double rank_tol) {
  const Index k = columns.cols();
  if (k > 0) {
    const Index rank = numerical_rank(columns, rank_tol);
    if (rank < k) {
      throw Error(ErrorKind::RankDeficient, "basis has rank " + std::to_string(rank) +
                                                " but declares " + std::to_string(k) + " columns");
    }
  }
  return BasisColumns{std::move(columns)};
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

struct MmHeader {
  std::string format;    // coordinate | array
  std::string field;     // real | integer
  std::string symmetry;  // symmetric | general | ...
};

class MmReader {
 public:
  explicit MmReader(const fs::path& path) : path_(path), in_(path) {
    if (!in_) throw Error(ErrorKind::Io, "cannot open " + path.string());
  }

  MmHeader header() {
    std::string line;
    if (!std::getline(in_, line)) fail("empty file");
    std::istringstream ss(line);
    std::string banner, object;
    MmHeader h;
    ss >> banner >> object >> h.format >> h.field >> h.symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix") fail("missing MatrixMarket banner");
    h.format = lower(h.format);
    h.field = lower(h.field);
    h.symmetry = lower(h.symmetry);
    if (h.format != "coordinate" && h.format != "array") fail("unsupported format " + h.format);
    if (h.field != "real" && h.field != "integer" && h.field != "double") {
      fail("unsupported field " + h.field);
    }
    return h;
  }

  // Next non-comment, non-blank line split into tokens.
  std::vector<std::string> tokens() {
    std::string line;
    while (std::getline(in_, line)) {
      ++lineno_;
      if (line.empty() || line[0] == '%') continue;
      std::istringstream ss(line);
      std::vector<std::string> out;
      std::string tok;
      while (ss >> tok) out.push_back(tok);
      if (!out.empty()) return out;
    }
    return {};
  }

  // Values may be spread arbitrarily over lines (array format).
  double next_value() {
    while (pending_.empty()) {
      auto t = tokens();
      if (t.empty()) fail("unexpected end of data");
      pending_.assign(t.rbegin(), t.rend());
    }
    const std::string tok = pending_.back();
    pending_.pop_back();
    return to_double(tok);
  }

  bool trailing_data() {
    if (!pending_.empty()) return true;
    return !tokens().empty();
  }

  double to_double(const std::string& s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end) fail("bad number '" + s + "'");
    return v;
  }

  Index to_index(const std::string& s) {
    long long v = 0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end) fail("bad integer '" + s + "'");
    return static_cast<Index>(v);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::Parse, path_.string() + ":" + std::to_string(lineno_ + 1) + ": " + msg);
  }

 private:
  fs::path path_;
  std::ifstream in_;
  Index lineno_ = 0;
  std::vector<std::string> pending_;
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.precision(17);
  return out;
}

}  // namespace

SymMatrix read_matrix_market(const fs::path& path) {
  MmReader rd(path);
  const MmHeader h = rd.header();
  if (h.symmetry != "symmetric") {
    rd.fail("matrix must be declared symmetric (got '" + h.symmetry + "')");
  }
  auto size = rd.tokens();
  std::string name = path.stem().string();

  if (h.format == "coordinate") {
    if (size.size() != 3) rd.fail("expected 'rows cols nnz'");
    const Index rows = rd.to_index(size[0]), cols = rd.to_index(size[1]), nnz = rd.to_index(size[2]);
    if (rows != cols || rows < 0 || nnz < 0) rd.fail("symmetric matrix must be square");
    std::vector<Triplet> t;
    t.reserve(static_cast<size_t>(nnz));
    for (Index e = 0; e < nnz; ++e) {
      auto tok = rd.tokens();
      if (tok.size() != 3) rd.fail("expected 'row col value'");
      const Index i = rd.to_index(tok[0]) - 1, j = rd.to_index(tok[1]) - 1;
      if (i < 0 || j < 0 || i >= rows || j >= rows) rd.fail("index out of bounds");
      t.push_back({i, j, rd.to_double(tok[2])});
    }
    if (rd.trailing_data()) rd.fail("more entries than declared");
    return SymMatrix(rows, std::move(t), name);
  }

  if (size.size() != 2) rd.fail("expected 'rows cols'");
  const Index rows = rd.to_index(size[0]), cols = rd.to_index(size[1]);
  if (rows != cols || rows < 0) rd.fail("symmetric matrix must be square");
  std::vector<Triplet> t;
  for (Index j = 0; j < rows; ++j) {
    for (Index i = j; i < rows; ++i) {
      const double v = rd.next_value();
      if (v != 0.0) t.push_back({i, j, v});
    }
  }
  if (rd.trailing_data()) rd.fail("more entries than declared");
  return SymMatrix(rows, std::move(t), name);
}

void write_matrix_market(const SymMatrix& a, const fs::path& path) {
  auto out = open_out(path);
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  if (!a.name().empty()) out << "% " << a.name() << "\n";
  out << a.size() << " " << a.size() << " " << a.entries().size() << "\n";
  for (const auto& t : a.entries()) out << t.row + 1 << " " << t.col + 1 << " " << t.value << "\n";
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

BasisColumns read_basis(const fs::path& path, Index n, double rank_tol) {
  MmReader rd(path);
  const MmHeader h = rd.header();
  if (h.format != "array" || h.symmetry != "general") {
    rd.fail("basis must be a general array matrix");
  }
  auto size = rd.tokens();
  if (size.size() != 2) rd.fail("expected 'rows cols'");
  const Index rows = rd.to_index(size[0]), cols = rd.to_index(size[1]);
  if (rows != n) {
    throw Error(ErrorKind::Dimension, path.string() + ": basis has " + std::to_string(rows) +
                                          " rows, expected " + std::to_string(n));
  }
  if (cols < 0) rd.fail("negative column count");
  Matrix z(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) z(i, j) = rd.next_value();
  }
  if (rd.trailing_data()) rd.fail("more entries than declared");
  return make_basis(std::move(z), rank_tol);
}

void write_basis(const BasisColumns& z, const fs::path& path) {
  auto out = open_out(path);
  out << "%%MatrixMarket matrix array real general\n";
  out << z.rows() << " " << z.cols() << "\n";
  for (Index j = 0; j < z.cols(); ++j) {
    for (Index i = 0; i < z.rows(); ++i) out << z.columns(i, j) << "\n";
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

ValidationReport validate_bundle(const ProblemBundle& b, double tau_null) {
  const Index n = b.size();
  if (b.kg.size() != n || b.zn.rows() != n || b.zc.rows() != n) {
    throw Error(ErrorKind::Dimension, "validate_bundle: inconsistent dimensions");
  }
  const Matrix k = b.k.to_dense();
  const Matrix kg = b.kg.to_dense();
  const double nk = norm1(k), nkg = norm1(kg);
  auto ratio = [](const Matrix& a, double anorm, const Vector& z) {
    const double denom = anorm * z.norm();
    return denom == 0.0 ? 0.0 : (a * z).norm() / denom;
  };

  ValidationReport rep;
  auto check = [&](const char* which, const Matrix& z, bool common) {
    for (Index j = 0; j < z.cols(); ++j) {
      ColumnCheck c{which, j, ratio(k, nk, z.col(j)), ratio(kg, nkg, z.col(j))};
      const std::string tag = std::string(which) + "[" + std::to_string(j) + "]";
      if (c.k_ratio > tau_null) {
        rep.pass = false;
        rep.failures.push_back(tag + ": ||K z|| ratio " + std::to_string(c.k_ratio));
      }
      if (common && c.kg_ratio > tau_null) {
        rep.warnings.push_back(tag + ": ||KG z|| ratio " + std::to_string(c.kg_ratio));
      }
      rep.columns.push_back(std::move(c));
    }
  };
  check("ZN", b.zn.columns, false);
  check("ZC", b.zc.columns, true);
  return rep;
}

ProblemBundle read_bundle(const fs::path& dir) {
  ProblemBundle b;
  b.k = read_matrix_market(dir / "K.mtx");
  b.kg = read_matrix_market(dir / "KG.mtx");
  const Index n = b.k.size();
  if (b.kg.size() != n) throw Error(ErrorKind::Dimension, "K and KG differ in size");
  b.zn = fs::exists(dir / "ZN.mtx") ? read_basis(dir / "ZN.mtx", n) : BasisColumns{Matrix(n, 0)};
  b.zc = fs::exists(dir / "ZC.mtx") ? read_basis(dir / "ZC.mtx", n) : BasisColumns{Matrix(n, 0)};
  return b;
}

void write_bundle(const ProblemBundle& b, const fs::path& dir) {
  fs::create_directories(dir);
  write_matrix_market(b.k, dir / "K.mtx");
  write_matrix_market(b.kg, dir / "KG.mtx");
  write_basis(b.zn, dir / "ZN.mtx");
  write_basis(b.zc, dir / "ZC.mtx");
}

void write_trace(const std::vector<TraceRow>& rows, const fs::path& path) {
  auto out = open_out(path);
  out << "step,vnorm,beta\n";
  for (const auto& r : rows) out << r.step << "," << r.vnorm << "," << r.beta << "\n";
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

std::vector<TraceRow> read_trace(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "step,vnorm,beta") {
    throw Error(ErrorKind::Parse, path.string() + ": missing trace header");
  }
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    TraceRow r;
    char c1 = 0, c2 = 0;
    if (!(ss >> r.step >> c1 >> r.vnorm >> c2 >> r.beta) || c1 != ',' || c2 != ',') {
      throw Error(ErrorKind::Parse, path.string() + ": bad trace row '" + line + "'");
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace buckle
