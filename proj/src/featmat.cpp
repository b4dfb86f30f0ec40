#include "fer/featmat.hpp"

#include "fer/error.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fer {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& path) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw UnsupportedFormat("non-numeric CSV field '" + s + "' in " + path);
    }
    return v;
}

} // namespace

FeatureMatrix stack_features(const std::vector<FeatureMatrix>& parts) {
    if (parts.empty()) throw InvalidArgument("stack_features needs at least one part");
    const int rows = parts.front().rows;
    int total_cols = 0;
    int labeled = -1;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].rows != rows) {
            throw ShapeError("stack_features: part row counts differ");
        }
        if (parts[i].has_labels()) {
            if (labeled >= 0) throw InvalidArgument("stack_features: multiple parts carry labels");
            labeled = static_cast<int>(i);
        }
        total_cols += parts[i].cols;
    }
    FeatureMatrix out(rows, total_cols);
    int col0 = 0;
    for (const FeatureMatrix& p : parts) {
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < p.cols; ++c) out.at(r, col0 + c) = p.at(r, c);
        }
        col0 += p.cols;
    }
    if (labeled >= 0) out.labels = parts[labeled].labels;
    return out;
}

void save_csv(const FeatureMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw WriteError("cannot open " + path + " for writing");
    for (int c = 0; c < m.cols; ++c) {
        if (c) out << ',';
        out << 'f' << c;
    }
    if (m.has_labels()) out << (m.cols ? ",label" : "label");
    out << '\n';
    for (int r = 0; r < m.rows; ++r) {
        for (int c = 0; c < m.cols; ++c) {
            if (c) out << ',';
            out << format_double(m.at(r, c));
        }
        if (m.has_labels()) {
            if (m.cols) out << ',';
            out << m.labels[r];
        }
        out << '\n';
    }
    if (!out) throw WriteError("failed writing " + path);
}

FeatureMatrix load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFound("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw UnsupportedFormat("empty CSV " + path);
    const std::vector<std::string> header = split_line(line);
    const bool has_labels = !header.empty() && header.back() == "label";
    const int cols = static_cast<int>(header.size()) - (has_labels ? 1 : 0);

    FeatureMatrix m;
    m.cols = cols;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_line(line);
        if (static_cast<int>(fields.size()) != cols + (has_labels ? 1 : 0)) {
            throw UnsupportedFormat("ragged CSV row in " + path);
        }
        for (int c = 0; c < cols; ++c) m.data.push_back(parse_double(fields[c], path));
        if (has_labels) {
            m.labels.push_back(static_cast<int>(parse_double(fields[cols], path)));
        }
        ++m.rows;
    }
    return m;
}

void save_binary(const FeatureMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw WriteError("cannot open " + path + " for writing");
    const char magic[8] = {'F', 'E', 'R', 'M', 'A', 'T', '0', '1'};
    out.write(magic, 8);
    const std::int64_t rows = m.rows, cols = m.cols;
    const std::uint8_t has_labels = m.has_labels() ? 1 : 0;
    out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
    out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
    out.write(reinterpret_cast<const char*>(&has_labels), sizeof(has_labels));
    out.write(reinterpret_cast<const char*>(m.data.data()),
              static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    if (has_labels) {
        for (int l : m.labels) {
            const std::int32_t v = l;
            out.write(reinterpret_cast<const char*>(&v), sizeof(v));
        }
    }
    if (!out) throw WriteError("failed writing " + path);
}

FeatureMatrix load_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFound("cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (in.gcount() != 8 || std::memcmp(magic, "FERMAT01", 8) != 0) {
        throw UnsupportedFormat("bad magic in " + path);
    }
    std::int64_t rows = 0, cols = 0;
    std::uint8_t has_labels = 0;
    in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
    in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
    in.read(reinterpret_cast<char*>(&has_labels), sizeof(has_labels));
    if (!in || rows < 0 || cols < 0 || rows * cols > (1LL << 34)) {
        throw UnsupportedFormat("bad dimensions in " + path);
    }
    FeatureMatrix m(static_cast<int>(rows), static_cast<int>(cols));
    in.read(reinterpret_cast<char*>(m.data.data()),
            static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != m.data.size() * sizeof(double)) {
        throw UnsupportedFormat("truncated data in " + path);
    }
    if (has_labels) {
        m.labels.resize(m.rows);
        for (int r = 0; r < m.rows; ++r) {
            std::int32_t v = 0;
            in.read(reinterpret_cast<char*>(&v), sizeof(v));
            m.labels[r] = v;
        }
        if (!in) throw UnsupportedFormat("truncated labels in " + path);
    }
    return m;
}

void save_curve(const CurveSeries& c, const std::string& path) {
    if (c.x.size() != c.y.size()) throw ShapeError("curve columns differ in length");
    if (c.x.empty()) throw InvalidArgument("refusing to write an empty curve");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw WriteError("cannot open " + path + " for writing");
    out << c.x_name << ',' << c.y_name << '\n';
    for (std::size_t i = 0; i < c.x.size(); ++i) {
        out << format_double(c.x[i]) << ',' << format_double(c.y[i]) << '\n';
    }
    if (!out) throw WriteError("failed writing " + path);
}

CurveSeries load_curve(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFound("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw UnsupportedFormat("empty curve file " + path);
    const std::vector<std::string> header = split_line(line);
    if (header.size() != 2) throw UnsupportedFormat("curve CSV must have two columns: " + path);
    CurveSeries c;
    c.x_name = header[0];
    c.y_name = header[1];
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_line(line);
        if (fields.size() != 2) throw UnsupportedFormat("ragged curve row in " + path);
        c.x.push_back(parse_double(fields[0], path));
        c.y.push_back(parse_double(fields[1], path));
    }
    return c;
}

} // namespace fer
