#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace kuramoto {

/// Oriented edge between two oscillators, 0-based, `tail < head`.
struct Edge {
  std::size_t tail;
  std::size_t head;
};

/// Number of unordered pairs of `n` oscillators.
constexpr std::size_t edge_count(std::size_t n) noexcept { return n * (n - 1) / 2; }

/// Position of edge (i, j), i < j, in lexicographic order
/// (0,1),(0,2),...,(0,n-1),(1,2),...
std::size_t edge_index(std::size_t n, std::size_t i, std::size_t j);

/// Inverse of edge_index.
Edge edge_endpoints(std::size_t n, std::size_t index);

/// Vertex-by-edge incidence matrix of the complete graph on N vertices.
///
/// Column k belongs to the k-th lexicographic pair (i, j) and has +1 in row i
/// and -1 in row j. Every topology is obtained from this fixed matrix by
/// zeroing coupling gains.
class IncidenceMatrix {
 public:
  explicit IncidenceMatrix(std::size_t n);

  std::size_t nodes() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t edges() const noexcept { return static_cast<std::size_t>(entries_.cols()); }
  Edge edge(std::size_t k) const { return edge_endpoints(nodes(), k); }

  const Eigen::MatrixXi& entries() const noexcept { return entries_; }
  const Eigen::MatrixXd& real() const noexcept { return real_; }

 private:
  Eigen::MatrixXi entries_;
  Eigen::MatrixXd real_;
};

/// BᵀB, the e×e edge Laplacian. Diagonal is 2; (i, j) is +1 when the two edges
/// share their tail or their head, -1 when one's tail is the other's head.
Eigen::MatrixXi edge_laplacian(const IncidenceMatrix& b);

/// Finite network of phase oscillators with symmetric coupling.
///
/// Gains are indexed by edge in lexicographic order; a zero gain means the
/// pair is not connected. The dynamics use K = diag(K̃)/N.
class OscillatorNetwork {
 public:
  /// Throws Error(invalid_argument) on N < 2, length mismatch, negative or
  /// non-finite entries.
  OscillatorNetwork(Eigen::VectorXd natural_frequencies, Eigen::VectorXd coupling_gains);

  std::size_t size() const noexcept { return static_cast<std::size_t>(omega_.size()); }
  std::size_t edge_count() const noexcept { return static_cast<std::size_t>(gains_.size()); }

  const Eigen::VectorXd& natural_frequencies() const noexcept { return omega_; }
  const Eigen::VectorXd& coupling_gains() const noexcept { return gains_; }
  /// Diagonal of K = diag(K̃)/N.
  const Eigen::VectorXd& coupling_matrix_diagonal() const noexcept { return k_diag_; }

  const IncidenceMatrix& incidence() const noexcept { return incidence_; }
  /// BᵀB as doubles.
  const Eigen::MatrixXd& edge_laplacian() const noexcept { return edge_laplacian_; }

  bool operator==(const OscillatorNetwork& other) const {
    return omega_ == other.omega_ && gains_ == other.gains_;
  }

 private:
  Eigen::VectorXd omega_;
  Eigen::VectorXd gains_;
  Eigen::VectorXd k_diag_;
  IncidenceMatrix incidence_;
  Eigen::MatrixXd edge_laplacian_;
};

/// True iff the graph with edge set {k : K̃ₖ > 0} connects all N vertices.
/// Exact union-find; no numerical rank.
bool is_connected(const OscillatorNetwork& net);

}  // namespace kuramoto
