#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "lbmo/field.hpp"

namespace lbmo {

/// FFTW plans and scratch for one torus grid (power-of-two sides). Not safe
/// for concurrent use; hold one per worker.
///
/// Spectra are the unnormalized r2c layout: ny rows of nx/2+1 modes.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(const GridSpec& grid);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  const GridSpec& grid() const { return grid_; }
  int modes_x() const { return grid_.nx / 2 + 1; }
  std::size_t spectrum_size() const { return static_cast<std::size_t>(grid_.ny) * modes_x(); }

  /// Integer wavenumber of column i / row j (signed for rows).
  int mode_x(int i) const { return i; }
  int mode_y(int j) const { return j <= grid_.ny / 2 ? j : j - grid_.ny; }
  /// Physical wavenumbers m * 2 pi / l.
  double kx(int i) const { return mode_x(i) * kTwoPi / grid_.lx; }
  double ky(int j) const { return mode_y(j) * kTwoPi / grid_.ly; }
  bool nyquist(int i, int j) const { return i == grid_.nx / 2 || j == grid_.ny / 2; }
  /// 2/3 rule: keep modes with 3|m| < n in both directions.
  bool dealias_keep(int i, int j) const {
    return 3 * std::abs(mode_x(i)) < grid_.nx && 3 * std::abs(mode_y(j)) < grid_.ny;
  }
  /// r2c weight of column i in a full-spectrum sum (interior columns stand
  /// for a conjugate pair).
  double mode_weight(int i) const { return (i == 0 || i == grid_.nx / 2) ? 1.0 : 2.0; }

  void forward(std::span<const double> values, std::vector<std::complex<double>>& spectrum);
  /// Includes the 1/N normalization; `spectrum` is left untouched.
  void inverse(std::span<const std::complex<double>> spectrum, std::vector<double>& values);

 private:
  GridSpec grid_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

/// u = grad-perp psi with laplacian psi = omega, i.e. u_hat = -i k_perp omega_hat / |k|^2,
/// k_perp = (-k2, k1). Mode (0, 0) and the Nyquist modes of u are zero.
/// Throws unless |mean omega| <= 1e-12 max|omega|.
VectorField2D velocity_from_vorticity_torus(const ScalarField2D& omega, SpectralWorkspace& ws);
/// Same, on a spectrum already computed by ws.forward; the mean is not checked.
void velocity_from_spectrum(std::span<const std::complex<double>> omega_hat, SpectralWorkspace& ws,
                            std::vector<double>& u1, std::vector<double>& u2);

/// Stream function psi (laplacian psi = omega, zero mean) and its mixed
/// derivative psi_xy; u = (-psi_y, psi_x) is velocity_from_vorticity_torus.
struct StreamFunction {
  ScalarField2D psi;
  ScalarField2D psi_xy;
};
StreamFunction stream_from_vorticity(const ScalarField2D& omega, SpectralWorkspace& ws);

/// Midpoint quadrature of K * omega, K(x) = x_perp / (2 pi |x|^2), over the
/// support nodes of a window field; the self term is dropped. Grids above
/// 256^2 and support reaching the window edge are rejected.
VectorField2D velocity_from_vorticity_direct(const ScalarField2D& omega);

/// Spectral divergence, max-normed relative to max|u| (0 for u = 0).
double divergence_residual(const VectorField2D& u, SpectralWorkspace& ws);
/// max |curl u - omega'| / max|omega|, omega' being omega without its mean
/// and Nyquist modes.
double curl_residual(const VectorField2D& u, const ScalarField2D& omega, SpectralWorkspace& ws);

/// Kinetic energy 0.5 * integral |u|^2, from sum |omega_hat|^2 / |k|^2.
double energy(const ScalarField2D& omega, SpectralWorkspace& ws);

}  // namespace lbmo
