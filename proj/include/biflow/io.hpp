#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace biflow {

/// Decimal form with 17 significant digits; round-trips a double exactly
/// through strtod.
std::string fmt_double(double value);

/// Write the whole content to a temp file in the same directory, then rename
/// over the target. Failures never leave a partial file at `path`.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// Point cloud CSV: header "x0,...,x{d-1}[,label]", one row per point,
/// LF line endings.
struct PointsCsv {
    std::vector<std::vector<double>> points;
    std::vector<std::size_t> labels;  // empty when the label column is absent
    bool has_labels = false;
};

std::string points_to_csv(const std::vector<std::vector<double>>& points,
                          const std::vector<std::size_t>* labels);
PointsCsv points_from_csv(const std::string& text);
PointsCsv read_points_csv(const std::string& path);

}  // namespace biflow
