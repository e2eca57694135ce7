#include "mkdv/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mkdv::fft {
namespace {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// The FFTW planner is not thread-safe; fftw_execute_dft on an existing plan is.
class PlanCache {
public:
    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second.get();
        std::vector<cplx> scratch(n);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (p == nullptr) throw std::runtime_error("fftw: plan creation failed");
        plans_.emplace(key, PlanHandle(p));
        return p;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, PlanHandle> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

void execute(std::span<const cplx> in, std::span<cplx> out, int sign) {
    if (in.size() != out.size()) throw std::invalid_argument("fft: size mismatch");
    if (in.empty()) return;
    if (in.data() != out.data()) std::copy(in.begin(), in.end(), out.begin());
    auto* buf = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(cache().get(out.size(), sign), buf, buf);
}

} // namespace

void forward(std::span<const cplx> in, std::span<cplx> out) { execute(in, out, FFTW_FORWARD); }
void backward(std::span<const cplx> in, std::span<cplx> out) { execute(in, out, FFTW_BACKWARD); }

} // namespace mkdv::fft
