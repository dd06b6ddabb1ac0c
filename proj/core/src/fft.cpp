#include "nlsplit/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace nlsplit::fft {
namespace {

using PlanKey = std::tuple<int, int, int>;  // rows, cols, sign

struct DoubleApi {
  using Real = double;
  using Plan = fftw_plan;
  using Cplx = fftw_complex;
  static Plan plan_1d(int n, Cplx* b, int sign, unsigned f) { return fftw_plan_dft_1d(n, b, b, sign, f); }
  static Plan plan_2d(int r, int c, Cplx* b, int sign, unsigned f) {
    return fftw_plan_dft_2d(r, c, b, b, sign, f);
  }
  static void execute(Plan p, Cplx* b) { fftw_execute_dft(p, b, b); }
  static void destroy(Plan p) { fftw_destroy_plan(p); }
};

struct LongApi {
  using Real = long double;
  using Plan = fftwl_plan;
  using Cplx = fftwl_complex;
  static Plan plan_1d(int n, Cplx* b, int sign, unsigned f) { return fftwl_plan_dft_1d(n, b, b, sign, f); }
  static Plan plan_2d(int r, int c, Cplx* b, int sign, unsigned f) {
    return fftwl_plan_dft_2d(r, c, b, b, sign, f);
  }
  static void execute(Plan p, Cplx* b) { fftwl_execute_dft(p, b, b); }
  static void destroy(Plan p) { fftwl_destroy_plan(p); }
};

// FFTW planning is not thread-safe, execution of an existing plan on new
// arrays is. Planning therefore happens under one mutex shared by both
// precisions.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <class Api>
class PlanCache {
 public:
  using Plan = typename Api::Plan;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) Api::destroy(plan);
  }

  Plan get(int rows, int cols, int sign) {
    std::lock_guard lock(planner_mutex());
    const PlanKey key{rows, cols, sign};
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<std::complex<typename Api::Real>> scratch(static_cast<std::size_t>(rows) * cols);
    auto* buf = reinterpret_cast<typename Api::Cplx*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Plan plan = rows == 1 ? Api::plan_1d(cols, buf, sign, flags) : Api::plan_2d(rows, cols, buf, sign, flags);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::map<PlanKey, Plan> plans_;
};

template <class Api>
PlanCache<Api>& cache() {
  static PlanCache<Api> instance;
  return instance;
}

template <class Api, class T>
void run(std::span<T> data, int rows, int cols, int sign) {
  if (data.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw std::invalid_argument("fft: buffer size does not match shape");
  if (data.empty()) return;
  auto* buf = reinterpret_cast<typename Api::Cplx*>(data.data());
  Api::execute(cache<Api>().get(rows, cols, sign), buf);
}

}  // namespace

void forward(std::span<Complex> data) {
  run<DoubleApi>(data, 1, static_cast<int>(data.size()), FFTW_FORWARD);
}

void backward(std::span<Complex> data) {
  run<DoubleApi>(data, 1, static_cast<int>(data.size()), FFTW_BACKWARD);
}

void forward(std::span<ComplexExt> data) {
  run<LongApi>(data, 1, static_cast<int>(data.size()), FFTW_FORWARD);
}

void backward(std::span<ComplexExt> data) {
  run<LongApi>(data, 1, static_cast<int>(data.size()), FFTW_BACKWARD);
}

void forward_2d(std::span<Complex> data, int rows, int cols) {
  run<DoubleApi>(data, rows, cols, FFTW_FORWARD);
}

void backward_2d(std::span<Complex> data, int rows, int cols) {
  run<DoubleApi>(data, rows, cols, FFTW_BACKWARD);
}

}  // namespace nlsplit::fft
