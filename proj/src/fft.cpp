#include "opintegral/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <sstream>

namespace opintegral {

namespace {

// FFTW's planner is not thread-safe; execution with new-array calls is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Plan {
 public:
  template <typename Make>
  explicit Plan(Make&& make) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_ = make();
  }
  ~Plan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void run() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_ = nullptr;
};

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

void PeriodicGrid::validate() const {
  if (dim != 1 && dim != 2) throw ValidationError("grid: dimension must be 1 or 2");
  if (!(period > 0.0)) throw ValidationError("grid: period must be positive");
  if (points < 4 || (points & (points - 1)) != 0) {
    std::ostringstream os;
    os << "grid: points per axis must be a power of two >= 4, got " << points;
    throw ValidationError(os.str());
  }
}

CVector fft(const CVector& in, bool forward) {
  CVector src = in;
  CVector out(in.size());
  const int n = static_cast<int>(in.size());
  Plan plan([&] {
    return fftw_plan_dft_1d(n, as_fftw(src.data()), as_fftw(out.data()),
                            forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  });
  plan.run();
  return out;
}

CMatrix fft2(const CMatrix& in, bool forward) {
  if (in.rows() != in.cols()) throw ValidationError("fft2: square input expected");
  CMatrix src = in;
  CMatrix out(in.rows(), in.cols());
  const int n = static_cast<int>(in.rows());
  // Column-major storage is the row-major transpose; the 2D DFT commutes
  // with transposition, so the buffer can be handed over as is.
  Plan plan([&] {
    return fftw_plan_dft_2d(n, n, as_fftw(src.data()), as_fftw(out.data()),
                            forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  });
  plan.run();
  return out;
}

}  // namespace opintegral
