#include "nhad/biortho.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace nhad {

BiorthogonalFrame::BiorthogonalFrame(Matrix right, Matrix left)
    : right_(std::move(right)), left_(std::move(left)) {
  if (right_.rows() != right_.cols() || left_.rows() != left_.cols() || right_.rows() != left_.rows())
    throw Error(ErrorKind::DimensionMismatch, "frame matrices must be square and of equal size");
  if (right_.rows() < 1) throw Error(ErrorKind::DimensionMismatch, "frame must be non-empty");
}

void Spectrum::validate() const {
  for (std::size_t m = 0; m < values.size(); ++m) {
    for (std::size_t n = m + 1; n < values.size(); ++n) {
      const double scale = std::max({1.0, std::abs(values[m]), std::abs(values[n])});
      if (std::abs(values[m] - values[n]) <= 4.0 * std::numeric_limits<double>::epsilon() * scale)
        throw Error(ErrorKind::DegenerateSpectrum,
                    "eigenvalues " + std::to_string(m) + " and " + std::to_string(n) + " coincide");
    }
  }
}

BiorthogonalFrame frame_from_matrix(const Matrix& right, double det_floor) {
  if (right.rows() != right.cols() || right.rows() == 0)
    throw Error(ErrorKind::DimensionMismatch, "frame matrix must be square and non-empty");
  Eigen::PartialPivLU<Matrix> lu(right);
  const double col_norm = right.colwise().norm().maxCoeff();
  const double volume = std::pow(col_norm, static_cast<double>(right.rows()));
  const double det = std::abs(lu.determinant());
  if (!(col_norm > 0.0) || !(det > det_floor * volume))
    throw Error(ErrorKind::SingularFrame, "|det A| = " + std::to_string(det) + " is below the floor");
  Matrix left = lu.solve(Matrix::Identity(right.rows(), right.cols()));
  return BiorthogonalFrame(right, std::move(left));
}

double check_biorthogonality(const BiorthogonalFrame& frame) {
  const auto n = frame.right().rows();
  const Matrix eye = Matrix::Identity(n, n);
  const double bi = (frame.left() * frame.right() - eye).cwiseAbs().maxCoeff();
  const double closure = (frame.right() * frame.left() - eye).cwiseAbs().maxCoeff();
  return std::max(bi, closure);
}

Matrix assemble_hamiltonian(const BiorthogonalFrame& frame, const Spectrum& spectrum) {
  if (spectrum.size() != frame.dim())
    throw Error(ErrorKind::DimensionMismatch, "spectrum size does not match frame dimension");
  spectrum.validate();
  Vector e(static_cast<Eigen::Index>(spectrum.size()));
  for (std::size_t i = 0; i < spectrum.size(); ++i) e(static_cast<Eigen::Index>(i)) = spectrum.values[i];
  return frame.right() * e.asDiagonal() * frame.left();
}

Complex project_mode(const BiorthogonalFrame& frame, const Vector& state, std::size_t n) {
  if (n >= frame.dim()) throw Error(ErrorKind::IndexOutOfRange, "mode index " + std::to_string(n));
  if (static_cast<std::size_t>(state.size()) != frame.dim())
    throw Error(ErrorKind::DimensionMismatch, "state size does not match frame dimension");
  return frame.left().row(static_cast<Eigen::Index>(n)).transpose().cwiseProduct(state).sum();
}

}  // namespace nhad
