#pragma once

#include "jmdm/dataset.hpp"

namespace jmdm {

struct KernelConfig {
  double epsilon_factor = 1.0;  // multiplier on the heuristic kernel scale
  double alpha = 1.0;           // density normalization power, in [0, 1]
  int dim = 3;                  // embedding coordinates to keep
};

// Kernel scale heuristic: max over points of the squared distance to
// their nearest neighbor. Throws when that value is 0 (every point has
// an exact duplicate), since the kernel would degenerate.
double heuristic_epsilon(const Matrix& points);

// Dense pairwise squared Euclidean distances (clamped at 0).
Matrix pairwise_squared_distances(const Matrix& points);

// Row-stochastic random-walk matrix over the Gaussian affinity graph,
// after the alpha density normalization. `degrees` are the row sums of
// the alpha-normalized kernel (the D in K = D^-1 W_alpha) and are what
// the spectral decomposition conjugates with.
struct MarkovMatrix {
  Matrix kernel;   // M x M, rows sum to 1
  Vector degrees;  // length M, strictly positive
  double epsilon;  // resolved kernel scale
};

MarkovMatrix build_markov(const Matrix& points, const KernelConfig& cfg);

// Diffusion-maps embedding. Eigenpairs come from the symmetric conjugate
// S = D^{1/2} K D^{-1/2}; with pi the stationary distribution, the right
// and left eigenvectors are scaled as psi_l = v_l / sqrt(pi) and
// phi_l = v_l * sqrt(pi), which makes them biorthonormal with psi_0 = 1
// and phi_0 = pi. Coordinate l of point i is eigenvalues[l] * psi[i][l].
// The trivial (lambda=1, constant) pair is checked and excluded.
struct SpectralEmbedding {
  double epsilon = 0;    // resolved kernel scale
  Vector eigenvalues;    // length d, descending, trivial pair dropped
  Matrix psi;            // M x d right eigenvectors
  Matrix coordinates;    // M x d, psi scaled by eigenvalues
  Vector stationary;     // phi_0, positive, sums to 1

  int point_count() const { return static_cast<int>(psi.rows()); }
  int dim() const { return static_cast<int>(eigenvalues.size()); }
};

// dim must be in [1, M-1]. Throws when the leading eigenvalue is not
// within 1e-6 of 1 or the leading eigenvector is not constant (either
// signals a matrix that is not a connected Markov kernel).
SpectralEmbedding decompose(const MarkovMatrix& markov, int dim);

// Squared diffusion distance straight from the kernel rows:
//   sum_m (K(i,m) - K(j,m))^2 / stationary(m).
double diffusion_distance_direct(const Matrix& kernel,
                                 const Vector& stationary, int i, int j);

// The same metric from the embedding: sum_l lambda_l^2 (psi_l(i) -
// psi_l(j))^2, i.e. the squared Euclidean gap between coordinate rows.
// Equals the direct form when all M-1 nontrivial pairs are kept; a
// truncated embedding gives a lower bound.
double diffusion_distance_spectral(const SpectralEmbedding& emb, int i, int j);

}  // namespace jmdm
