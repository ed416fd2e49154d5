#pragma once
// Trigonometric interpolation on a uniform doubly periodic grid.
#include <complex>
#include <vector>

namespace anosov {

using cplx = std::complex<double>;
using CGrid = std::vector<cplx>;  // row-major, index iy*nx + ix

class PeriodicGrid {
 public:
  PeriodicGrid() = default;
  PeriodicGrid(int nx, int ny, double Lx, double Ly);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double Lx() const { return Lx_; }
  double Ly() const { return Ly_; }
  std::size_t size() const { return std::size_t(nx_) * ny_; }
  double x(int ix) const { return Lx_ * ix / nx_; }
  double y(int iy) const { return Ly_ * iy / ny_; }
  double cell_area() const { return Lx_ * Ly_ / double(size()); }

  // unnormalized forward transform, inverse divides by size()
  CGrid forward(const CGrid& f) const;
  CGrid inverse(const CGrid& F) const;

  // spectral derivatives; the Nyquist wavenumber is dropped so that
  // the discrete operators stay exactly skew-adjoint
  CGrid dx(const CGrid& f) const;
  CGrid dy(const CGrid& f) const;
  CGrid del(const CGrid& f) const;     // (dx - i dy)/2
  CGrid delbar(const CGrid& f) const;  // (dx + i dy)/2
  CGrid laplacian(const CGrid& f) const;

  // signed integer wavenumber for FFT slot j
  static int wavenumber(int j, int n);
  double kx(int j) const;
  double ky(int j) const;

  // zero-padded resampling onto a finer grid (factor >= 1)
  CGrid upsample(const CGrid& f, int factor) const;
  CGrid downsample(const CGrid& f, int factor) const;

 private:
  void fft_rows(CGrid& a, bool inv) const;
  void fft_cols(CGrid& a, bool inv) const;
  CGrid spectral_multiply(const CGrid& f, cplx ax, cplx ay) const;

  int nx_ = 0, ny_ = 0;
  double Lx_ = 1, Ly_ = 1;
};

}  // namespace anosov
