#pragma once

#include "kdb/contact_sample.hpp"
#include "kdb/grid.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace kdb {

// Shortest decimal form that reads back to the same double.
std::string format_number(double v);

// "n=<int>" header line, then n rows of n tab-separated values.
Eigen::MatrixXd read_matrix_tsv(const std::string& path);
void write_matrix_tsv(const std::string& path, const Eigen::MatrixXd& m);

// One value per line.
std::vector<double> read_vector(const std::string& path);
void write_vector(const std::string& path, const std::vector<double>& v);
void write_vector(const std::string& path, const Eigen::VectorXd& v);

// Tab-separated x, y, count per line; '#' lines are comments.
ContactSample read_sample_tsv(const std::string& path);
void write_sample_tsv(const std::string& path, const ContactSample& s);

// Tab-separated grid center and value per line.
GridFunction1D read_bias_tsv(const std::string& path);
void write_bias_tsv(const std::string& path, const GridFunction1D& f);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

} // namespace kdb
