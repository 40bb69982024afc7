#include "stabledrift/fft.hpp"

#include <fftw3.h>
#include <omp.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "stabledrift/kernels.hpp"

namespace sd::fft {

namespace {

std::mutex planner_mutex;

struct PlanKey {
    int dim, n, sign, threads;
    bool operator<(const PlanKey& o) const {
        return std::tie(dim, n, sign, threads) < std::tie(o.dim, o.n, o.sign, o.threads);
    }
};

fftw_plan get_plan(const TorusGrid& g, int sign, bool threaded) {
    static std::map<PlanKey, fftw_plan> cache;
    static bool threads_ready = false;
    int nthreads = threaded ? omp_get_max_threads() : 1;
    PlanKey key{g.dim, g.N, sign, nthreads};
    std::lock_guard<std::mutex> lock(planner_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    if (!threads_ready) {
        fftw_init_threads();
        threads_ready = true;
    }
    fftw_plan_with_nthreads(nthreads);
    std::vector<int> dims(static_cast<std::size_t>(g.dim), g.N);
    std::vector<cplx> scratch(g.size());
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan p = fftw_plan_dft(g.dim, dims.data(), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, p);
    return p;
}

}  // namespace

void forward(cplx* data, const TorusGrid& g, bool threaded) {
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(get_plan(g, FFTW_FORWARD, threaded), buf, buf);
}

void backward(cplx* data, const TorusGrid& g, bool threaded) {
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(get_plan(g, FFTW_BACKWARD, threaded), buf, buf);
    const double s = 1.0 / static_cast<double>(g.size());
    if (threaded)
        kernels::parallel::scale(data, s, g.size());
    else
        kernels::serial::scale(data, s, g.size());
}

void forward(Field& f, bool threaded) { forward(f.data(), f.grid(), threaded); }
void backward(Field& f, bool threaded) { backward(f.data(), f.grid(), threaded); }

}  // namespace sd::fft
