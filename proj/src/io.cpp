#include "biflow/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace biflow {

std::string fmt_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("cannot rename temp file onto '" + path + "'");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string points_to_csv(const std::vector<std::vector<double>>& points,
                          const std::vector<std::size_t>* labels) {
    const std::size_t dim = points.empty() ? 2 : points.front().size();
    std::string out;
    for (std::size_t j = 0; j < dim; ++j) {
        if (j) out += ',';
        out += "x" + std::to_string(j);
    }
    if (labels) out += ",label";
    out += '\n';
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (j) out += ',';
            out += fmt_double(p[j]);
        }
        if (labels) out += ',' + std::to_string((*labels)[i]);
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

PointsCsv points_from_csv(const std::string& text) {
    PointsCsv result;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("points csv: empty file");
    const auto header = split_fields(line);
    std::size_t dim = header.size();
    result.has_labels = !header.empty() && header.back() == "label";
    if (result.has_labels) --dim;
    if (dim == 0) throw std::runtime_error("points csv: header has no coordinate columns");

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw std::runtime_error("points csv: line " + std::to_string(line_no) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(header.size()));
        }
        std::vector<double> p(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            char* end = nullptr;
            errno = 0;
            p[j] = std::strtod(fields[j].c_str(), &end);
            if (end == fields[j].c_str() || *end != '\0' || errno == ERANGE) {
                throw std::runtime_error("points csv: line " + std::to_string(line_no) +
                                         ": bad number '" + fields[j] + "'");
            }
        }
        result.points.push_back(std::move(p));
        if (result.has_labels) {
            char* end = nullptr;
            const long v = std::strtol(fields.back().c_str(), &end, 10);
            if (end == fields.back().c_str() || *end != '\0' || v < 0) {
                throw std::runtime_error("points csv: line " + std::to_string(line_no) +
                                         ": bad label '" + fields.back() + "'");
            }
            result.labels.push_back(static_cast<std::size_t>(v));
        }
    }
    return result;
}

PointsCsv read_points_csv(const std::string& path) {
    return points_from_csv(read_file(path));
}

}  // namespace biflow
