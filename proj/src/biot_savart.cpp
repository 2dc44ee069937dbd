#include "lbmo/biot_savart.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <string>

#include "lbmo/error.hpp"
#include "lbmo/parallel.hpp"

namespace lbmo {

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

using cplx = std::complex<double>;

}  // namespace

struct SpectralWorkspace::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

SpectralWorkspace::SpectralWorkspace(const GridSpec& grid) : grid_(grid), plans_(std::make_unique<Plans>()) {
  grid.validate();
  if (!grid.is_torus()) throw Error("SpectralWorkspace: grid must be a torus");
  if (!grid.power_of_two()) throw Error("SpectralWorkspace: grid sides must be powers of two, got " + grid.id());
  std::lock_guard lock(planner_mutex());
  plans_->real = fftw_alloc_real(grid.size());
  plans_->spec = fftw_alloc_complex(spectrum_size());
  // ESTIMATE keeps the plan, and therefore every result, independent of timing.
  plans_->r2c = fftw_plan_dft_r2c_2d(grid.ny, grid.nx, plans_->real, plans_->spec, FFTW_ESTIMATE);
  plans_->c2r = fftw_plan_dft_c2r_2d(grid.ny, grid.nx, plans_->spec, plans_->real, FFTW_ESTIMATE);
  if (!plans_->r2c || !plans_->c2r) throw Error("SpectralWorkspace: FFTW planning failed");
}

SpectralWorkspace::~SpectralWorkspace() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plans_->r2c);
  fftw_destroy_plan(plans_->c2r);
  fftw_free(plans_->real);
  fftw_free(plans_->spec);
}

void SpectralWorkspace::forward(std::span<const double> values, std::vector<cplx>& spectrum) {
  if (values.size() != grid_.size()) throw Error("SpectralWorkspace::forward: size mismatch");
  std::memcpy(plans_->real, values.data(), values.size() * sizeof(double));
  fftw_execute(plans_->r2c);
  spectrum.resize(spectrum_size());
  std::memcpy(static_cast<void*>(spectrum.data()), plans_->spec, spectrum_size() * sizeof(fftw_complex));
}

void SpectralWorkspace::inverse(std::span<const cplx> spectrum, std::vector<double>& values) {
  if (spectrum.size() != spectrum_size()) throw Error("SpectralWorkspace::inverse: size mismatch");
  std::memcpy(plans_->spec, static_cast<const void*>(spectrum.data()), spectrum_size() * sizeof(fftw_complex));
  fftw_execute(plans_->c2r);
  values.resize(grid_.size());
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = plans_->real[k] * scale;
}

void velocity_from_spectrum(std::span<const cplx> omega_hat, SpectralWorkspace& ws, std::vector<double>& u1,
                            std::vector<double>& u2) {
  const int mx = ws.modes_x();
  const int ny = ws.grid().ny;
  std::vector<cplx> h1(ws.spectrum_size()), h2(ws.spectrum_size());
  const cplx I(0.0, 1.0);
  for (int j = 0; j < ny; ++j) {
    const double k2 = ws.ky(j);
    for (int i = 0; i < mx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * mx + i;
      if ((i == 0 && j == 0) || ws.nyquist(i, j)) continue;
      const double k1 = ws.kx(i);
      const cplx w = omega_hat[k] / (k1 * k1 + k2 * k2);
      h1[k] = I * k2 * w;
      h2[k] = -I * k1 * w;
    }
  }
  ws.inverse(h1, u1);
  ws.inverse(h2, u2);
}

VectorField2D velocity_from_vorticity_torus(const ScalarField2D& omega, SpectralWorkspace& ws) {
  if (!(omega.grid() == ws.grid())) throw Error("velocity_from_vorticity_torus: workspace grid mismatch");
  const double mean = omega.mean();
  if (std::abs(mean) > 1e-12 * omega.max_abs())
    throw Error("velocity_from_vorticity_torus: vorticity has nonzero mean " + std::to_string(mean) +
                "; the torus Biot-Savart law needs zero total vorticity");
  std::vector<cplx> hat;
  ws.forward(omega.values(), hat);
  std::vector<double> u1, u2;
  velocity_from_spectrum(hat, ws, u1, u2);
  return VectorField2D(omega.grid(), std::move(u1), std::move(u2));
}

StreamFunction stream_from_vorticity(const ScalarField2D& omega, SpectralWorkspace& ws) {
  if (!(omega.grid() == ws.grid())) throw Error("stream_from_vorticity: workspace grid mismatch");
  std::vector<cplx> hat, mixed;
  ws.forward(omega.values(), hat);
  const int mx = ws.modes_x();
  mixed.assign(hat.size(), cplx{});
  for (int j = 0; j < ws.grid().ny; ++j)
    for (int i = 0; i < mx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * mx + i;
      if ((i == 0 && j == 0) || ws.nyquist(i, j)) {
        hat[k] = cplx{};
        continue;
      }
      const double k1 = ws.kx(i), k2 = ws.ky(j);
      hat[k] = -hat[k] / (k1 * k1 + k2 * k2);
      mixed[k] = -k1 * k2 * hat[k];
    }
  std::vector<double> psi, pxy;
  ws.inverse(hat, psi);
  ws.inverse(mixed, pxy);
  return {ScalarField2D(omega.grid(), std::move(psi)), ScalarField2D(omega.grid(), std::move(pxy))};
}

VectorField2D velocity_from_vorticity_direct(const ScalarField2D& omega) {
  const GridSpec& g = omega.grid();
  if (g.is_torus()) throw Error("velocity_from_vorticity_direct: needs a window field");
  if (g.size() > 256u * 256u) throw Error("velocity_from_vorticity_direct: grid " + g.id() + " exceeds 256^2 nodes");
  const double thresh = 1e-14 * omega.max_abs();
  struct Src {
    Point x;
    double w;
  };
  std::vector<Src> src;
  const double cell = g.hx() * g.hy();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double v = omega(i, j);
      if (v == 0.0 || std::abs(v) < thresh) continue;
      if (i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1)
        throw Error("velocity_from_vorticity_direct: support touches the window edge at node (" +
                    std::to_string(i) + ", " + std::to_string(j) + ")");
      src.push_back({g.node(i, j), v * cell});
    }
  }
  std::vector<double> u1(g.size(), 0.0), u2(g.size(), 0.0);
  const double c = 1.0 / kTwoPi;
  parallel_for(static_cast<std::size_t>(g.ny), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i < g.nx; ++i) {
      const Point x = g.node(i, j);
      double a1 = 0.0, a2 = 0.0;
      for (const Src& s : src) {
        const double d1 = x.x - s.x.x;
        const double d2 = x.y - s.x.y;
        const double r2 = d1 * d1 + d2 * d2;
        if (r2 == 0.0) continue;  // self term
        a1 += -d2 / r2 * s.w;
        a2 += d1 / r2 * s.w;
      }
      u1[omega.index(i, j)] = c * a1;
      u2[omega.index(i, j)] = c * a2;
    }
  });
  return VectorField2D(g, std::move(u1), std::move(u2));
}

double divergence_residual(const VectorField2D& u, SpectralWorkspace& ws) {
  const double mag = u.max_magnitude();
  if (mag == 0.0) return 0.0;
  std::vector<cplx> a, b;
  ws.forward(u.u1(), a);
  ws.forward(u.u2(), b);
  const int mx = ws.modes_x();
  const cplx I(0.0, 1.0);
  for (int j = 0; j < ws.grid().ny; ++j)
    for (int i = 0; i < mx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * mx + i;
      a[k] = ws.nyquist(i, j) ? cplx{} : I * (ws.kx(i) * a[k] + ws.ky(j) * b[k]);
    }
  std::vector<double> div;
  ws.inverse(a, div);
  double m = 0.0;
  for (double v : div) m = std::max(m, std::abs(v));
  return m / mag;
}

double curl_residual(const VectorField2D& u, const ScalarField2D& omega, SpectralWorkspace& ws) {
  std::vector<cplx> a, b, w;
  ws.forward(u.u1(), a);
  ws.forward(u.u2(), b);
  ws.forward(omega.values(), w);
  const int mx = ws.modes_x();
  const cplx I(0.0, 1.0);
  for (int j = 0; j < ws.grid().ny; ++j)
    for (int i = 0; i < mx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * mx + i;
      if ((i == 0 && j == 0) || ws.nyquist(i, j)) {
        a[k] = cplx{};
        continue;
      }
      a[k] = I * (ws.kx(i) * b[k] - ws.ky(j) * a[k]) - w[k];
    }
  std::vector<double> r;
  ws.inverse(a, r);
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  const double scale = omega.max_abs();
  return scale == 0.0 ? m : m / scale;
}

double energy(const ScalarField2D& omega, SpectralWorkspace& ws) {
  std::vector<cplx> w;
  ws.forward(omega.values(), w);
  const int mx = ws.modes_x();
  double sum = 0.0;
  for (int j = 0; j < ws.grid().ny; ++j)
    for (int i = 0; i < mx; ++i) {
      if ((i == 0 && j == 0) || ws.nyquist(i, j)) continue;
      const double k2 = ws.kx(i) * ws.kx(i) + ws.ky(j) * ws.ky(j);
      sum += ws.mode_weight(i) * std::norm(w[static_cast<std::size_t>(j) * mx + i]) / k2;
    }
  const double n = static_cast<double>(ws.grid().size());
  // mean |u|^2 = sum |u_hat|^2 / N^2 (Parseval), times the area, halved.
  return 0.5 * omega.grid().lx * omega.grid().ly * sum / (n * n);
}

}  // namespace lbmo
