#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace rnlab::io {

/// Decimal text with 17 significant digits (round-trips a double exactly).
std::string fmt(double x);

/// Cumulative trapezoid integral of f on a uniform grid with spacing dx;
/// result[0] = 0.
Eigen::ArrayXd cumtrapz(const Eigen::ArrayXd& f, double dx);

/// Trapezoid integral on a uniform grid.
double trapz(const Eigen::ArrayXd& f, double dx);

/// Compact binary table: magic "RNL1", version u16, n_rows u32, n_cols u32,
/// then row-major little-endian 64-bit floats.
void write_binary_table(const std::string& filename, const Eigen::MatrixXd& rows);
Eigen::MatrixXd read_binary_table(const std::string& filename);

}  // namespace rnlab::io
