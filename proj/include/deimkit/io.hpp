#pragma once

#include <string>
#include <vector>

#include "deimkit/deim.hpp"

namespace deimkit {

/// shortest round-trip decimal (17 significant digits)
std::string format_double(double v);

/// Writes exactly `content` with LF endings (binary mode).
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Weight files: "W <kind> <m>" then entries — identity: none; diagonal: m
// values; dense: m*m row-major; sparse: "i j value" triplets, 1-based, upper
// triangle only.
void write_weight(const std::string& path, const WeightOperator& w);
WeightOperator read_weight(const std::string& path);

// Snapshot files: "Y <m> <n>" then column-major values.
void write_snapshots(const std::string& path, const Matrix& y);
Matrix read_snapshots(const std::string& path);

// Selection line: "S <m> <s> : i1 i2 ... is" (1-based on the wire).
std::string selection_line(const SelectionOperator& sel);
SelectionOperator parse_selection_line(const std::string& line);
void write_selection(const std::string& path, const SelectionOperator& sel);
SelectionOperator read_selection(const std::string& path);

/// Projector metadata: variant tag + basis file reference + selection line.
void write_projector(const std::string& path, const DeimProjector& d,
                     const std::string& basis_ref);

/// One-row CSV diagnostic dump {variant,r,s,eta,kappa,errorConstant,angles}
/// with angles ';'-joined.
void write_projector_diagnostics(const std::string& path, const DeimProjector& d,
                                 const CanonicalStructure& cs);

/// CSV with LF endings; every cell printed via format_double.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace deimkit
