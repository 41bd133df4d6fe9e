#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "lflx/fft.hpp"

namespace lflx {

namespace {

// FFTW planning is not thread-safe; execution via the new-array interface is.
// Plans are created with FFTW_UNALIGNED so they can run on any caller buffer.
class PlanCache {
  public:
    fftw_plan get(int dim, int n, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_tuple(dim, n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        std::int64_t total = 1;
        for (int a = 0; a < dim; ++a) total *= n;
        std::vector<cplx> a(total), b(total);
        fftw_plan p;
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        if (dim == 2) {
            p = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(a.data()),
                                 reinterpret_cast<fftw_complex*>(b.data()), sign, flags);
        } else {
            p = fftw_plan_dft_3d(n, n, n, reinterpret_cast<fftw_complex*>(a.data()),
                                 reinterpret_cast<fftw_complex*>(b.data()), sign, flags);
        }
        if (!p) throw std::runtime_error("fftw plan creation failed");
        plans_.emplace(key, p);
        return p;
    }

  private:
    std::mutex mu_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

}  // namespace

void fft_execute(const Grid& grid, const cplx* in, cplx* out, int sign) {
    if (in == out) throw std::invalid_argument("fft_execute: in-place not supported");
    fftw_plan p = cache().get(grid.dim(), grid.n(), sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace lflx
