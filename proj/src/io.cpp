#include "rnlab/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace rnlab::io {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

Eigen::ArrayXd cumtrapz(const Eigen::ArrayXd& f, double dx) {
    Eigen::ArrayXd out(f.size());
    out[0] = 0.0;
    for (Eigen::Index i = 1; i < f.size(); ++i)
        out[i] = out[i - 1] + 0.5 * dx * (f[i - 1] + f[i]);
    return out;
}

double trapz(const Eigen::ArrayXd& f, double dx) {
    if (f.size() < 2) return 0.0;
    return dx * (f.sum() - 0.5 * (f[0] + f[f.size() - 1]));
}

namespace {
constexpr char kMagic[4] = {'R', 'N', 'L', '1'};
constexpr std::uint16_t kVersion = 1;
}  // namespace

void write_binary_table(const std::string& filename, const Eigen::MatrixXd& rows) {
    std::ofstream out(filename, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + filename);
    out.write(kMagic, 4);
    std::uint16_t ver = kVersion;
    std::uint32_t nr = static_cast<std::uint32_t>(rows.rows());
    std::uint32_t nc = static_cast<std::uint32_t>(rows.cols());
    out.write(reinterpret_cast<const char*>(&ver), sizeof(ver));
    out.write(reinterpret_cast<const char*>(&nr), sizeof(nr));
    out.write(reinterpret_cast<const char*>(&nc), sizeof(nc));
    for (std::uint32_t i = 0; i < nr; ++i)
        for (std::uint32_t j = 0; j < nc; ++j) {
            double v = rows(i, j);
            out.write(reinterpret_cast<const char*>(&v), sizeof(v));
        }
}

Eigen::MatrixXd read_binary_table(const std::string& filename) {
    std::ifstream in(filename, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + filename);
    char magic[4];
    in.read(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error(filename + ": bad magic");
    std::uint16_t ver;
    std::uint32_t nr, nc;
    in.read(reinterpret_cast<char*>(&ver), sizeof(ver));
    in.read(reinterpret_cast<char*>(&nr), sizeof(nr));
    in.read(reinterpret_cast<char*>(&nc), sizeof(nc));
    if (ver != kVersion) throw std::runtime_error(filename + ": unsupported version");
    Eigen::MatrixXd rows(nr, nc);
    for (std::uint32_t i = 0; i < nr; ++i)
        for (std::uint32_t j = 0; j < nc; ++j) {
            double v;
            in.read(reinterpret_cast<char*>(&v), sizeof(v));
            rows(i, j) = v;
        }
    if (!in) throw std::runtime_error(filename + ": truncated table");
    return rows;
}

}  // namespace rnlab::io
