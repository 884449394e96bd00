#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

#include "ctl/levy.hpp"

namespace ctl {

namespace {

struct FftPlan {
    int size;
    double* real;
    fftw_complex* spec;
    fftw_plan forward;
    fftw_plan backward;

    explicit FftPlan(int n) : size(n) {
        real = fftw_alloc_real(static_cast<std::size_t>(n));
        spec = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
        forward = fftw_plan_dft_r2c_1d(n, real, spec, FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_1d(n, spec, real, FFTW_ESTIMATE);
    }
    ~FftPlan() {
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
        fftw_free(real);
        fftw_free(spec);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
};

// Online convolution c_i = sum_{j<i} u_j k_{i-j}, where u_j depends on c_j.
class VolterraSolver {
public:
    VolterraSolver(std::vector<double> kernel, double step)
        : k_(std::move(kernel)), h_(step), w_(k_.size()), u_(k_.size()), acc_(k_.size(), 0.0) {
        diag_ = 1.0 - 0.5 * h_ * k_[0];
    }

    std::vector<double> run() {
        solve(0, w_.size());
        return std::move(w_);
    }

private:
    static constexpr std::size_t kLeaf = 96;

    void finish(std::size_t i, double c) {
        w_[i] = (1.0 + h_ * c) / diag_;
        if (i == 0) w_[i] = 1.0;
        u_[i] = i == 0 ? 0.5 * w_[i] : w_[i];
    }

    void solve(std::size_t l, std::size_t r) {
        if (r - l <= kLeaf) {
            for (std::size_t i = l; i < r; ++i) {
                double c = acc_[i];
                for (std::size_t j = l; j < i; ++j) c += u_[j] * k_[i - j];
                finish(i, c);
            }
            return;
        }
        std::size_t m = l + (r - l) / 2;
        solve(l, m);
        spread(l, m, r);
        solve(m, r);
    }

    FftPlan& plan(int n) {
        auto it = plans_.find(n);
        if (it == plans_.end()) it = plans_.emplace(n, std::make_unique<FftPlan>(n)).first;
        return *it->second;
    }

    // acc[i] += sum_{j in [l,m)} u_j k_{i-j} for i in [m, r)
    void spread(std::size_t l, std::size_t m, std::size_t r) {
        const std::size_t na = m - l, nb = r - l;
        int n = 1;
        while (static_cast<std::size_t>(n) < na + nb) n <<= 1;
        FftPlan& p = plan(n);
        const std::size_t half = static_cast<std::size_t>(n / 2 + 1);

        std::fill(p.real, p.real + n, 0.0);
        for (std::size_t j = 0; j < na; ++j) p.real[j] = u_[l + j];
        fftw_execute(p.forward);
        std::vector<std::complex<double>> a(half);
        for (std::size_t i = 0; i < half; ++i) a[i] = {p.spec[i][0], p.spec[i][1]};

        std::fill(p.real, p.real + n, 0.0);
        for (std::size_t q = 0; q < nb; ++q) p.real[q] = k_[q];
        fftw_execute(p.forward);
        for (std::size_t i = 0; i < half; ++i) {
            std::complex<double> b{p.spec[i][0], p.spec[i][1]};
            std::complex<double> c = a[i] * b;
            p.spec[i][0] = c.real();
            p.spec[i][1] = c.imag();
        }
        fftw_execute(p.backward);
        const double scale = 1.0 / n;
        for (std::size_t i = m; i < r; ++i) acc_[i] += p.real[i - l] * scale;
    }

    std::vector<double> k_;
    double h_;
    double diag_;
    std::vector<double> w_, u_, acc_;
    std::map<int, std::unique_ptr<FftPlan>> plans_;
};

std::vector<double> kernel_values(double x_max, double step) {
    if (!(step > 0.0) || step > 1e-2 + 1e-15) throw std::invalid_argument("scale_function: step too coarse (need <= 0.01)");
    if (!(x_max > 0.0)) throw std::invalid_argument("scale_function: x_max must be positive");
    auto n = static_cast<std::size_t>(std::llround(x_max / step)) + 1;
    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) k[i] = jump_sf(step * static_cast<double>(i));
    return k;
}

}  // namespace

ScaleFunctionTable scale_function(double x_max, double step) {
    VolterraSolver solver(kernel_values(x_max, step), step);
    return ScaleFunctionTable(step, solver.run());
}

ScaleFunctionTable scale_function_reference(double x_max, double step) {
    std::vector<double> k = kernel_values(x_max, step);
    const std::size_t n = k.size();
    std::vector<double> w(n);
    const double diag = 1.0 - 0.5 * step * k[0];
    w[0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        double c = 0.5 * w[0] * k[i];
        for (std::size_t j = 1; j < i; ++j) c += w[j] * k[i - j];
        w[i] = (1.0 + step * c) / diag;
    }
    return ScaleFunctionTable(step, std::move(w));
}

}  // namespace ctl
