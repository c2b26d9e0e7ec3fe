#include "deimkit/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace deimkit {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << content;
  if (!out) throw ConfigError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open: " + path);
  return in;
}

[[noreturn]] void malformed(const std::string& path, const std::string& what) {
  throw ConfigError("malformed file " + path + ": " + what);
}

}  // namespace

void write_weight(const std::string& path, const WeightOperator& w) {
  std::ostringstream out;
  const Index m = w.dim();
  switch (w.kind()) {
    case WeightKind::Identity:
      out << "W identity " << m << "\n";
      break;
    case WeightKind::Diagonal: {
      out << "W diagonal " << m << "\n";
      Matrix d = w.dense();
      for (Index i = 0; i < m; ++i) out << format_double(d(i, i)) << "\n";
      break;
    }
    case WeightKind::DenseSpd: {
      out << "W dense " << m << "\n";
      Matrix d = w.dense();
      for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < m; ++j) out << (j ? " " : "") << format_double(d(i, j));
        out << "\n";
      }
      break;
    }
    case WeightKind::SparseSpd: {
      out << "W sparse " << m << "\n";
      const SparseMatrix& s = w.sparse_matrix();
      for (Index k = 0; k < s.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(s, k); it; ++it)
          if (it.row() <= it.col())
            out << it.row() + 1 << " " << it.col() + 1 << " "
                << format_double(it.value()) << "\n";
      break;
    }
  }
  write_text_file(path, out.str());
}

WeightOperator read_weight(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string tag, kind;
  Index m = 0;
  if (!(in >> tag >> kind >> m) || tag != "W") malformed(path, "expected 'W <kind> <m>'");
  if (m < 1) malformed(path, "dimension must be >= 1");
  if (kind == "identity") return WeightOperator::identity(m);
  if (kind == "diagonal") {
    Vector d(m);
    for (Index i = 0; i < m; ++i)
      if (!(in >> d(i))) malformed(path, "expected " + std::to_string(m) + " diagonal values");
    return WeightOperator::diagonal(std::move(d));
  }
  if (kind == "dense") {
    Matrix w(m, m);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j)
        if (!(in >> w(i, j))) malformed(path, "expected m*m dense values");
    return WeightOperator::dense_spd(w);
  }
  if (kind == "sparse") {
    std::vector<Eigen::Triplet<double>> trip;
    Index i, j;
    double v;
    while (in >> i >> j >> v) {
      if (i < 1 || j < 1 || i > m || j > m) malformed(path, "triplet index out of range");
      if (i > j) malformed(path, "sparse entries must be upper triangle");
      trip.emplace_back(i - 1, j - 1, v);
      if (i != j) trip.emplace_back(j - 1, i - 1, v);
    }
    SparseMatrix w(m, m);
    w.setFromTriplets(trip.begin(), trip.end());
    return WeightOperator::sparse_spd(std::move(w));
  }
  malformed(path, "unknown weight kind '" + kind + "'");
}

void write_snapshots(const std::string& path, const Matrix& y) {
  std::ostringstream out;
  out << "Y " << y.rows() << " " << y.cols() << "\n";
  for (Index j = 0; j < y.cols(); ++j)
    for (Index i = 0; i < y.rows(); ++i) out << format_double(y(i, j)) << "\n";
  write_text_file(path, out.str());
}

Matrix read_snapshots(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string tag;
  Index m = 0, n = 0;
  if (!(in >> tag >> m >> n) || tag != "Y") malformed(path, "expected 'Y <m> <n>'");
  if (m < 1 || n < 1) malformed(path, "dimensions must be >= 1");
  Matrix y(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i)
      if (!(in >> y(i, j))) malformed(path, "expected m*n values");
  return y;
}

std::string selection_line(const SelectionOperator& sel) {
  std::ostringstream out;
  out << "S " << sel.m << " " << sel.indices.size() << " :";
  for (Index i : sel.indices) out << " " << i + 1;
  return out.str();
}

SelectionOperator parse_selection_line(const std::string& line) {
  std::istringstream in(line);
  std::string tag, colon;
  Index m = 0, s = 0;
  if (!(in >> tag >> m >> s >> colon) || tag != "S" || colon != ":")
    throw ConfigError("malformed selection line: " + line);
  if (m < 1 || s < 1 || s > m) throw ConfigError("selection line sizes invalid: " + line);
  SelectionOperator sel;
  sel.m = m;
  for (Index k = 0; k < s; ++k) {
    Index i;
    if (!(in >> i) || i < 1 || i > m)
      throw ConfigError("selection line: bad index: " + line);
    for (Index seen : sel.indices)
      if (seen == i - 1)
        throw ConfigError("selection line: duplicate index: " + line);
    sel.indices.push_back(i - 1);
  }
  return sel;
}

void write_selection(const std::string& path, const SelectionOperator& sel) {
  write_text_file(path, selection_line(sel) + "\n");
}

SelectionOperator read_selection(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) malformed(path, "empty selection file");
  return parse_selection_line(line);
}

void write_projector(const std::string& path, const DeimProjector& d,
                     const std::string& basis_ref) {
  std::ostringstream out;
  out << "D " << to_string(d.variant()) << " r=" << d.rank()
      << " s=" << d.sample_count()
      << " eta=" << format_double(d.selection().eta)
      << " kappa=" << format_double(d.selection().kappa)
      << " errorConstant=" << format_double(d.error_constant()) << "\n";
  out << "basis " << basis_ref << "\n";
  out << selection_line(d.selection()) << "\n";
  write_text_file(path, out.str());
}

void write_projector_diagnostics(const std::string& path, const DeimProjector& d,
                                 const CanonicalStructure& cs) {
  std::ostringstream out;
  out << "variant,r,s,eta,kappa,errorConstant,angles\n";
  out << to_string(d.variant()) << "," << d.rank() << "," << d.sample_count() << ","
      << format_double(d.selection().eta) << "," << format_double(d.selection().kappa)
      << "," << format_double(d.error_constant()) << ",";
  for (Index i = 0; i < cs.angles.size(); ++i)
    out << (i ? ";" : "") << format_double(cs.angles(i));
  out << "\n";
  write_text_file(path, out.str());
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  out << header << "\n";
  for (const auto& row : rows) {
    for (size_t j = 0; j < row.size(); ++j)
      out << (j ? "," : "") << format_double(row[j]);
    out << "\n";
  }
  write_text_file(path, out.str());
}

}  // namespace deimkit
