#include "jmdm/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "jmdm/parallel.hpp"

namespace jmdm {

Matrix pairwise_squared_distances(const Matrix& points) {
  const Eigen::Index m = points.rows();
  const Vector sq = points.rowwise().squaredNorm();
  Matrix d2(m, m);
  parallel_for(0, static_cast<int>(m), [&](int lo, int hi) {
    d2.middleRows(lo, hi - lo).noalias() =
        -2.0 * points.middleRows(lo, hi - lo) * points.transpose();
    for (int i = lo; i < hi; ++i) {
      d2.row(i).array() += sq.transpose().array() + sq[i];
      d2(i, i) = 0.0;
    }
  });
  return d2.cwiseMax(0.0);
}

double heuristic_epsilon(const Matrix& points) {
  if (points.rows() < 2)
    throw std::invalid_argument("need at least 2 points for a kernel scale");
  const Matrix d2 = pairwise_squared_distances(points);
  double eps = 0.0;
  for (Eigen::Index j = 0; j < d2.rows(); ++j) {
    double nearest = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < d2.rows(); ++i)
      if (i != j && d2(i, j) < nearest) nearest = d2(i, j);
    if (nearest > eps) eps = nearest;
  }
  if (eps <= 0.0)
    throw std::runtime_error(
        "degenerate input: every point has an exact duplicate, kernel "
        "scale heuristic is 0");
  return eps;
}

MarkovMatrix build_markov(const Matrix& points, const KernelConfig& cfg) {
  if (cfg.epsilon_factor <= 0)
    throw std::invalid_argument("epsilon_factor must be positive");
  if (cfg.alpha < 0 || cfg.alpha > 1)
    throw std::invalid_argument("alpha must lie in [0, 1]");

  MarkovMatrix mk;
  mk.epsilon = cfg.epsilon_factor * heuristic_epsilon(points);

  Matrix w = pairwise_squared_distances(points);
  const double scale = -1.0 / (2.0 * mk.epsilon);
  parallel_for(0, static_cast<int>(w.rows()), [&](int lo, int hi) {
    w.middleRows(lo, hi - lo) =
        (w.middleRows(lo, hi - lo).array() * scale).exp();
  });

  // density normalization: W_a = W / (q_i^a q_j^a), q = row sums
  const Vector q = w.rowwise().sum();
  const Vector qa = q.array().pow(cfg.alpha);
  w = qa.cwiseInverse().asDiagonal() * w * qa.cwiseInverse().asDiagonal();

  mk.degrees = w.rowwise().sum();
  mk.kernel = mk.degrees.cwiseInverse().asDiagonal() * w;
  return mk;
}

SpectralEmbedding decompose(const MarkovMatrix& markov, int dim) {
  const Eigen::Index m = markov.kernel.rows();
  if (dim < 1 || dim > m - 1)
    throw std::invalid_argument("embedding dim must lie in [1, M-1]");
  if ((markov.degrees.array() <= 0).any())
    throw std::invalid_argument("degrees must be strictly positive");

  const Vector pi = markov.degrees / markov.degrees.sum();
  const Vector sqrt_pi = pi.array().sqrt();

  // symmetric conjugate S = D^{1/2} K D^{-1/2}; symmetrize the rounding
  Matrix s = sqrt_pi.asDiagonal() * markov.kernel *
             sqrt_pi.cwiseInverse().asDiagonal();
  s = 0.5 * (s + s.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");

  // ascending from Eigen; column m-1-l is the l-th largest
  auto eigval = [&](Eigen::Index l) { return solver.eigenvalues()[m - 1 - l]; };
  auto eigvec = [&](Eigen::Index l) { return solver.eigenvectors().col(m - 1 - l); };

  if (std::abs(eigval(0) - 1.0) > 1e-6)
    throw std::runtime_error(
        "leading eigenvalue " + std::to_string(eigval(0)) +
        " is not 1: input is not a Markov transition matrix");

  SpectralEmbedding emb;
  emb.epsilon = markov.epsilon;
  emb.eigenvalues.resize(dim);
  emb.psi.resize(m, dim);

  // psi_l = v_l / sqrt(pi); sign fixed so the largest-magnitude entry is
  // positive (ties to the lowest index)
  auto scaled_psi = [&](Eigen::Index l) {
    Vector psi = eigvec(l).cwiseQuotient(sqrt_pi);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < m; ++i)
      if (std::abs(psi[i]) > std::abs(psi[best])) best = i;
    if (psi[best] < 0) psi = -psi;
    return psi;
  };

  const Vector psi0 = scaled_psi(0);
  const double dev = (psi0.array() - psi0.mean()).abs().maxCoeff();
  if (dev > 1e-6 * std::max(1.0, std::abs(psi0.mean())))
    throw std::runtime_error(
        "leading eigenvector is not constant: input is not a connected "
        "Markov kernel");

  for (int l = 0; l < dim; ++l) {
    emb.eigenvalues[l] = eigval(l + 1);
    emb.psi.col(l) = scaled_psi(l + 1);
  }
  emb.coordinates = emb.psi * emb.eigenvalues.asDiagonal();

  // phi_0 = pi up to eigensolver noise; take it from the solver and
  // normalize to sum 1 (the division also fixes the sign)
  Vector phi0 = eigvec(0).cwiseProduct(sqrt_pi);
  phi0 /= phi0.sum();
  if ((phi0.array() <= 0).any())
    throw std::runtime_error("stationary distribution has non-positive entries");
  emb.stationary = phi0;
  return emb;
}

double diffusion_distance_direct(const Matrix& kernel,
                                 const Vector& stationary, int i, int j) {
  const Eigen::Index m = kernel.rows();
  if (i < 0 || j < 0 || i >= m || j >= m)
    throw std::out_of_range("diffusion_distance_direct: index out of range");
  const auto diff = kernel.row(i) - kernel.row(j);
  return (diff.transpose().array().square() / stationary.array()).sum();
}

double diffusion_distance_spectral(const SpectralEmbedding& emb, int i,
                                   int j) {
  if (i < 0 || j < 0 || i >= emb.point_count() || j >= emb.point_count())
    throw std::out_of_range("diffusion_distance_spectral: index out of range");
  return (emb.coordinates.row(i) - emb.coordinates.row(j)).squaredNorm();
}

}  // namespace jmdm
