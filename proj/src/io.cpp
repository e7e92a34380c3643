#include "ect/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ect/errors.hpp"

namespace ect {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ofstream out(path, mode);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ifstream in(path, mode);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    return in;
}

/// Shortest decimal form that round-trips a double exactly.
std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> split_doubles(const std::string& line, const std::string& where) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used == 0) throw std::runtime_error("bad number in " + where);
        out.push_back(v);
    }
    return out;
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    std::ofstream out = open_out(path, std::ios::out | std::ios::trunc);
    out << m.rows() << ',' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in = open_in(path, std::ios::in);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty csv: " + path.string());
    const auto dims = split_doubles(line, path.string());
    if (dims.size() != 2 || dims[0] < 0 || dims[1] < 0)
        throw std::runtime_error("bad csv header: " + path.string());
    const Eigen::Index rows = static_cast<Eigen::Index>(dims[0]);
    const Eigen::Index cols = static_cast<Eigen::Index>(dims[1]);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (!std::getline(in, line))
            throw std::runtime_error("truncated csv: " + path.string());
        const auto vals = split_doubles(line, path.string());
        if (static_cast<Eigen::Index>(vals.size()) != cols)
            throw std::runtime_error("ragged csv row: " + path.string());
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = vals[static_cast<size_t>(j)];
    }
    return m;
}

void write_vector_csv(const std::filesystem::path& path, const Eigen::VectorXd& v) {
    write_matrix_csv(path, v);
}

Eigen::VectorXd read_vector_csv(const std::filesystem::path& path) {
    const Eigen::MatrixXd m = read_matrix_csv(path);
    if (m.cols() != 1)
        throw std::runtime_error("expected a single-column csv: " + path.string());
    return m.col(0);
}

void write_pairs_csv(const std::filesystem::path& path,
                     const std::vector<std::pair<int, int>>& pairs) {
    std::ofstream out = open_out(path, std::ios::out | std::ios::trunc);
    for (const auto& [a, b] : pairs) out << a << ',' << b << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::pair<int, int>> read_pairs_csv(const std::filesystem::path& path) {
    std::ifstream in = open_in(path, std::ios::in);
    std::vector<std::pair<int, int>> pairs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto vals = split_doubles(line, path.string());
        if (vals.size() != 2) throw std::runtime_error("bad pair row: " + path.string());
        pairs.emplace_back(static_cast<int>(vals[0]), static_cast<int>(vals[1]));
    }
    return pairs;
}

void write_table_csv(const std::filesystem::path& path,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
    std::ofstream out = open_out(path, std::ios::out | std::ios::trunc);
    for (size_t j = 0; j < columns.size(); ++j) {
        if (j) out << ',';
        out << columns[j];
    }
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw std::invalid_argument("table row width does not match header");
        for (size_t j = 0; j < row.size(); ++j) {
            if (j) out << ',';
            out << format_double(row[j]);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_pgm(const std::filesystem::path& path, const Grid& grid,
               const Eigen::VectorXd& x_roi) {
    if (x_roi.size() != grid.n_roi())
        throw std::invalid_argument("write_pgm: image length does not match region");
    std::ofstream out = open_out(path, std::ios::out | std::ios::trunc | std::ios::binary);
    out << "P5\n" << grid.n2 << ' ' << grid.n1 << "\n255\n";
    std::vector<unsigned char> row(static_cast<size_t>(grid.n2));
    for (int i = 0; i < grid.n1; ++i) {
        for (int j = 0; j < grid.n2; ++j) {
            const int k = grid.roi_index(grid.flat(i, j));
            double v = k >= 0 ? x_roi[k] : 0.0;
            v = std::clamp(v, 0.0, 1.0);
            row[static_cast<size_t>(j)] =
                static_cast<unsigned char>(std::lround(v * 255.0));
        }
        out.write(reinterpret_cast<const char*>(row.data()), grid.n2);
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

std::string hex_digest(const unsigned char* digest, unsigned len) {
    static const char* hex = "0123456789abcdef";
    std::string out(2 * len, '0');
    for (unsigned i = 0; i < len; ++i) {
        out[2 * i] = hex[digest[i] >> 4];
        out[2 * i + 1] = hex[digest[i] & 0xf];
    }
    return out;
}

struct DigestCtx {
    EVP_MD_CTX* ctx;
    DigestCtx() : ctx(EVP_MD_CTX_new()) {
        if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1)
            throw std::runtime_error("sha256 init failed");
    }
    ~DigestCtx() { EVP_MD_CTX_free(ctx); }
    void update(const void* data, size_t len) {
        if (EVP_DigestUpdate(ctx, data, len) != 1)
            throw std::runtime_error("sha256 update failed");
    }
    std::string finish() {
        unsigned char digest[EVP_MAX_MD_SIZE];
        unsigned len = 0;
        if (EVP_DigestFinal_ex(ctx, digest, &len) != 1)
            throw std::runtime_error("sha256 final failed");
        return hex_digest(digest, len);
    }
};

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in = open_in(path, std::ios::in | std::ios::binary);
    DigestCtx d;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        const std::streamsize got = in.gcount();
        if (got > 0) d.update(buf, static_cast<size_t>(got));
    }
    return d.finish();
}

std::string sha256_string(const std::string& data) {
    DigestCtx d;
    d.update(data.data(), data.size());
    return d.finish();
}

}  // namespace ect
