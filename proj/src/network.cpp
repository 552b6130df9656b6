#include "kuramoto/network.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "kuramoto/error.hpp"

namespace kuramoto {

std::size_t edge_index(std::size_t n, std::size_t i, std::size_t j) {
  if (i >= j || j >= n) {
    throw Error(ErrorCode::invalid_argument,
                "edge (" + std::to_string(i) + ", " + std::to_string(j) + ") is not a pair i < j < " +
                    std::to_string(n));
  }
  // Edges before row i: (n-1) + (n-2) + ... + (n-i).
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

Edge edge_endpoints(std::size_t n, std::size_t index) {
  if (index >= edge_count(n)) {
    throw Error(ErrorCode::invalid_argument, "edge index " + std::to_string(index) + " out of range");
  }
  std::size_t i = 0;
  std::size_t row = n - 1;
  while (index >= row) {
    index -= row;
    ++i;
    --row;
  }
  return {i, i + 1 + index};
}

IncidenceMatrix::IncidenceMatrix(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::invalid_argument, "incidence matrix needs N >= 2");
  const auto e = edge_count(n);
  entries_ = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(e));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    for (Eigen::Index j = i + 1; j < static_cast<Eigen::Index>(n); ++j, ++k) {
      entries_(i, k) = 1;
      entries_(j, k) = -1;
    }
  }
  real_ = entries_.cast<double>();
}

Eigen::MatrixXi edge_laplacian(const IncidenceMatrix& b) {
  return b.entries().transpose() * b.entries();
}

OscillatorNetwork::OscillatorNetwork(Eigen::VectorXd natural_frequencies, Eigen::VectorXd coupling_gains)
    : omega_(std::move(natural_frequencies)),
      gains_(std::move(coupling_gains)),
      incidence_(omega_.size() >= 2 ? static_cast<std::size_t>(omega_.size()) : 2) {
  const auto n = static_cast<std::size_t>(omega_.size());
  if (n < 2) throw Error(ErrorCode::invalid_argument, "a network needs at least 2 oscillators");
  if (static_cast<std::size_t>(gains_.size()) != kuramoto::edge_count(n)) {
    throw Error(ErrorCode::invalid_argument,
                "expected " + std::to_string(kuramoto::edge_count(n)) + " coupling gains for N = " +
                    std::to_string(n) + ", got " + std::to_string(gains_.size()));
  }
  for (Eigen::Index i = 0; i < omega_.size(); ++i) {
    if (!std::isfinite(omega_[i])) {
      throw Error(ErrorCode::invalid_argument, "omega[" + std::to_string(i) + "] is not finite");
    }
  }
  for (Eigen::Index k = 0; k < gains_.size(); ++k) {
    if (!std::isfinite(gains_[k]) || gains_[k] < 0.0) {
      throw Error(ErrorCode::invalid_argument,
                  "coupling[" + std::to_string(k) + "] = " + std::to_string(gains_[k]) +
                      " must be finite and >= 0");
    }
  }
  k_diag_ = gains_ / static_cast<double>(n);
  edge_laplacian_ = kuramoto::edge_laplacian(incidence_).cast<double>();
}

bool is_connected(const OscillatorNetwork& net) {
  const auto n = net.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  std::size_t components = n;
  const auto& gains = net.coupling_gains();
  for (std::size_t k = 0; k < net.edge_count(); ++k) {
    if (gains[static_cast<Eigen::Index>(k)] <= 0.0) continue;
    const auto [i, j] = edge_endpoints(n, k);
    const auto ri = find(i);
    const auto rj = find(j);
    if (ri != rj) {
      parent[ri] = rj;
      --components;
    }
  }
  return components == 1;
}

}  // namespace kuramoto
