#pragma once

#include <vector>

#include "ubm/linalg.hpp"
#include "ubm/rng.hpp"

namespace ubm {

// Hermitian Brownian increment over a step dt: diagonal N(0, dt/n), strictly
// upper entries with independent real and imaginary parts N(0, dt/(2n)), so
// that E[(dH)^2] = dt I. Upper-triangle entries are drawn in row-major order.
HermitianMatrix hermitian_increment(Index n, double dt, RngStream& rng);

// k i.i.d. circular complex Gaussians: E Z = 0, E Z^2 = 0, E|Z|^2 = 1.
ComplexVector standard_complex_gaussian(Index k, RngStream& rng);

// Haar-distributed unitary from the QR factorization of a complex Ginibre
// matrix, with Q's columns rotated by the phases of diag(R).
UnitaryMatrix haar_unitary(Index n, RngStream& rng);

// The first p columns of haar_unitary(n, rng) for the same stream state.
// The Ginibre matrix is filled column by column, so column j of Q depends on
// the first j+1 columns only and the leading block costs O(n p^2).
ComplexMatrix haar_columns(Index n, Index p, RngStream& rng);

// Uniform permutation of {0, ..., n-1} by Fisher-Yates; entry i is the image
// of i.
std::vector<Index> uniform_permutation(Index n, RngStream& rng);

// Matrix with a 1 at (sigma(j), j) for a uniform permutation sigma.
UnitaryMatrix permutation_matrix(Index n, RngStream& rng);
ComplexMatrix permutation_to_matrix(const std::vector<Index>& sigma);

}  // namespace ubm
