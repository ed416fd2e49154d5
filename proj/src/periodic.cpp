#include "anosov/periodic.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <stdexcept>

namespace anosov {

PeriodicGrid::PeriodicGrid(int nx, int ny, double Lx, double Ly)
    : nx_(nx), ny_(ny), Lx_(Lx), Ly_(Ly) {
  if (nx < 2 || ny < 2 || !(Lx > 0) || !(Ly > 0))
    throw std::invalid_argument("PeriodicGrid: bad dimensions");
}

int PeriodicGrid::wavenumber(int j, int n) {
  if (2 * j == n) return 0;  // Nyquist slot
  return j <= n / 2 ? j : j - n;
}

double PeriodicGrid::kx(int j) const { return 2 * M_PI / Lx_ * wavenumber(j, nx_); }
double PeriodicGrid::ky(int j) const { return 2 * M_PI / Ly_ * wavenumber(j, ny_); }

void PeriodicGrid::fft_rows(CGrid& a, bool inv) const {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<cplx> in(nx_), out(nx_);
  for (int iy = 0; iy < ny_; ++iy) {
    for (int ix = 0; ix < nx_; ++ix) in[ix] = a[std::size_t(iy) * nx_ + ix];
    if (inv) fft.inv(out, in); else fft.fwd(out, in);
    for (int ix = 0; ix < nx_; ++ix) a[std::size_t(iy) * nx_ + ix] = out[ix];
  }
}

void PeriodicGrid::fft_cols(CGrid& a, bool inv) const {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<cplx> in(ny_), out(ny_);
  for (int ix = 0; ix < nx_; ++ix) {
    for (int iy = 0; iy < ny_; ++iy) in[iy] = a[std::size_t(iy) * nx_ + ix];
    if (inv) fft.inv(out, in); else fft.fwd(out, in);
    for (int iy = 0; iy < ny_; ++iy) a[std::size_t(iy) * nx_ + ix] = out[iy];
  }
}

CGrid PeriodicGrid::forward(const CGrid& f) const {
  if (f.size() != size()) throw std::invalid_argument("PeriodicGrid: size mismatch");
  CGrid a = f;
  fft_rows(a, false);
  fft_cols(a, false);
  return a;
}

CGrid PeriodicGrid::inverse(const CGrid& F) const {
  CGrid a = F;
  fft_cols(a, true);
  fft_rows(a, true);
  const double s = 1.0 / double(size());
  for (auto& v : a) v *= s;
  return a;
}

// multiply spectrum by (ax*i*kx + ay*i*ky)
CGrid PeriodicGrid::spectral_multiply(const CGrid& f, cplx ax, cplx ay) const {
  CGrid F = forward(f);
  const cplx I(0, 1);
  for (int iy = 0; iy < ny_; ++iy) {
    const double ky_ = ky(iy);
    for (int ix = 0; ix < nx_; ++ix)
      F[std::size_t(iy) * nx_ + ix] *= I * (ax * kx(ix) + ay * ky_);
  }
  return inverse(F);
}

CGrid PeriodicGrid::dx(const CGrid& f) const { return spectral_multiply(f, 1.0, 0.0); }
CGrid PeriodicGrid::dy(const CGrid& f) const { return spectral_multiply(f, 0.0, 1.0); }
CGrid PeriodicGrid::del(const CGrid& f) const {
  return spectral_multiply(f, 0.5, cplx(0, -0.5));
}
CGrid PeriodicGrid::delbar(const CGrid& f) const {
  return spectral_multiply(f, 0.5, cplx(0, 0.5));
}

CGrid PeriodicGrid::laplacian(const CGrid& f) const {
  CGrid F = forward(f);
  for (int iy = 0; iy < ny_; ++iy)
    for (int ix = 0; ix < nx_; ++ix) {
      const double a = kx(ix), b = ky(iy);
      F[std::size_t(iy) * nx_ + ix] *= -(a * a + b * b);
    }
  return inverse(F);
}

CGrid PeriodicGrid::upsample(const CGrid& f, int factor) const {
  if (factor == 1) return f;
  PeriodicGrid fine(nx_ * factor, ny_ * factor, Lx_, Ly_);
  CGrid F = forward(f);
  CGrid G(fine.size(), 0.0);
  for (int iy = 0; iy < ny_; ++iy) {
    if (2 * iy == ny_) continue;
    const int wy = wavenumber(iy, ny_);
    const int jy = wy >= 0 ? wy : wy + fine.ny();
    for (int ix = 0; ix < nx_; ++ix) {
      if (2 * ix == nx_) continue;
      const int wx = wavenumber(ix, nx_);
      const int jx = wx >= 0 ? wx : wx + fine.nx();
      G[std::size_t(jy) * fine.nx() + jx] = F[std::size_t(iy) * nx_ + ix];
    }
  }
  const double s = double(fine.size()) / double(size());
  for (auto& v : G) v *= s;
  return fine.inverse(G);
}

CGrid PeriodicGrid::downsample(const CGrid& f, int factor) const {
  // *this is the coarse grid; f lives on the grid refined by factor
  if (factor == 1) return f;
  PeriodicGrid fine(nx_ * factor, ny_ * factor, Lx_, Ly_);
  CGrid G = fine.forward(f);
  CGrid F(size(), 0.0);
  for (int iy = 0; iy < ny_; ++iy) {
    if (2 * iy == ny_) continue;
    const int wy = wavenumber(iy, ny_);
    const int jy = wy >= 0 ? wy : wy + fine.ny();
    for (int ix = 0; ix < nx_; ++ix) {
      if (2 * ix == nx_) continue;
      const int wx = wavenumber(ix, nx_);
      const int jx = wx >= 0 ? wx : wx + fine.nx();
      F[std::size_t(iy) * nx_ + ix] = G[std::size_t(jy) * fine.nx() + jx];
    }
  }
  const double s = double(size()) / double(fine.size());
  for (auto& v : F) v *= s;
  return inverse(F);
}

}  // namespace anosov
