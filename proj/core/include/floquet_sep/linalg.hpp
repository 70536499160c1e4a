#pragma once

#include <Eigen/Core>

namespace floquet_sep {

/// Operator norm induced by the Euclidean norm (largest singular value).
double operator_norm(const Eigen::MatrixXd& m);

/// exp(M) by scaling and squaring with Padé approximation.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m);

/// true iff every off-diagonal entry of `a` is >= 0.
bool is_metzler(const Eigen::MatrixXd& a);

/// Strong connectivity of the directed graph with an edge i -> j whenever
/// adj(j, i) > 0 and i != j (column-to-row convention of z' = A z).
bool graph_strongly_connected(const Eigen::MatrixXd& adj);

}  // namespace floquet_sep
