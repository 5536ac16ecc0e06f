#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "nhad/schedules.hpp"

namespace nhad {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kDefaultDetFloor = 1e-10;

/// Right eigenvectors |phi_n> (columns of `right`) paired with their left
/// partners <phi^_n| (rows of `left`). A frame is valid when left * right = I.
///
/// The constructor only checks shapes so that deliberately damaged frames can
/// be built for diagnostics; use frame_from_matrix() for a validated frame.
class BiorthogonalFrame {
 public:
  BiorthogonalFrame(Matrix right, Matrix left);

  std::size_t dim() const { return static_cast<std::size_t>(right_.rows()); }
  const Matrix& right() const { return right_; }
  const Matrix& left() const { return left_; }

 private:
  Matrix right_;
  Matrix left_;
};

/// Nondegenerate instantaneous eigenvalues E_n.
struct Spectrum {
  std::vector<Complex> values;

  std::size_t size() const { return values.size(); }
  /// Throws DegenerateSpectrum if two eigenvalues coincide.
  void validate() const;
};

/// Builds the frame whose left partners are the rows of A^{-1}.
/// Throws SingularFrame when |det A| <= det_floor * (max column norm)^N.
BiorthogonalFrame frame_from_matrix(const Matrix& right, double det_floor = kDefaultDetFloor);

/// max(|A'A - I|_max, |AA' - I|_max): biorthogonality and closure together.
double check_biorthogonality(const BiorthogonalFrame& frame);

/// H = sum_n |phi_n> E_n <phi^_n|.
Matrix assemble_hamiltonian(const BiorthogonalFrame& frame, const Spectrum& spectrum);

/// <phi^_n|state>, the left-partner projection (not the adjoint projection).
Complex project_mode(const BiorthogonalFrame& frame, const Vector& state, std::size_t n);

}  // namespace nhad
