#include "afc/spectral.hpp"

#include "afc/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

namespace afc {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    std::pair<fftw_plan, fftw_plan> get(int dim, int n) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_pair(dim, n);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        const std::size_t total = dim == 2 ? static_cast<std::size_t>(n) * n : static_cast<std::size_t>(n);
        auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
        fftw_plan fwd, bwd;
        if (dim == 1) {
            fwd = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        } else {
            fwd = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
        fftw_free(buf);
        plans_[key] = {fwd, bwd};
        return {fwd, bwd};
    }

private:
    std::mutex mu_;
    std::map<std::pair<int, int>, std::pair<fftw_plan, fftw_plan>> plans_;
};

struct Buffer {
    explicit Buffer(std::size_t n) : size(n), data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {}
    ~Buffer() { fftw_free(data); }
    Buffer(const Buffer&) = delete;
    Buffer& operator=(const Buffer&) = delete;
    std::size_t size;
    fftw_complex* data;
};

Frequency frequency_at(int dim, int np, double half_width, int k0, int k1) {
    Frequency f;
    const double scale = M_PI / half_width;
    const int ks[2] = {k0, k1};
    bool zero = true;
    for (int a = 0; a < dim; ++a) {
        const int k = ks[a];
        const int m = k < np / 2 ? k : k - np;
        f.xi[static_cast<std::size_t>(a)] = m * scale;
        f.nyquist[static_cast<std::size_t>(a)] = (k == np / 2);
        if (m != 0) zero = false;
    }
    f.zero = zero;
    return f;
}

// Embed u (extended by u[0]) into the padded array, apply m, and return the padded result.
void transform_padded(const Grid& g, const Field& u, const Multiplier& m, int pad, Buffer& buf) {
    const int dim = g.dim();
    const int n = g.n();
    const int np = n * pad;
    const int off = (np - n) / 2;
    const double fill = u.size() > 0 ? u[0] : 0.0;
    for (std::size_t i = 0; i < buf.size; ++i) {
        buf.data[i][0] = fill;
        buf.data[i][1] = 0.0;
    }
    for (std::size_t a = 0; a < g.size(); ++a) {
        auto idx = g.index(a);
        std::size_t p = dim == 1 ? static_cast<std::size_t>(idx[0] + off)
                                 : static_cast<std::size_t>(idx[0] + off) * static_cast<std::size_t>(np) + static_cast<std::size_t>(idx[1] + off);
        buf.data[p][0] = u[static_cast<Eigen::Index>(a)];
    }
    auto plans = PlanCache::instance().get(dim, np);
    fftw_execute_dft(plans.first, buf.data, buf.data);
    const double half = pad * g.L();
    const double norm = 1.0 / static_cast<double>(buf.size);
    const int n1 = dim == 2 ? np : 1;
    for (int k0 = 0; k0 < np; ++k0) {
        for (int k1 = 0; k1 < n1; ++k1) {
            const std::size_t p = static_cast<std::size_t>(k0) * static_cast<std::size_t>(n1) + static_cast<std::size_t>(k1);
            const std::complex<double> c(buf.data[p][0], buf.data[p][1]);
            const std::complex<double> r = c * m(frequency_at(dim, np, half, k0, k1)) * norm;
            buf.data[p][0] = r.real();
            buf.data[p][1] = r.imag();
        }
    }
    fftw_execute_dft(plans.second, buf.data, buf.data);
}

}  // namespace

Field apply_multiplier(const Grid& g, const Field& u, const Multiplier& m, int pad) {
    if (pad < 1) throw Error("spectral: pad must be >= 1");
    if (static_cast<std::size_t>(u.size()) != g.size()) throw Error("spectral: field size does not match grid");
    const int np = g.n() * pad;
    const std::size_t total = g.dim() == 2 ? static_cast<std::size_t>(np) * np : static_cast<std::size_t>(np);
    Buffer buf(total);
    transform_padded(g, u, m, pad, buf);
    const int off = (np - g.n()) / 2;
    Field out(u.size());
    for (std::size_t a = 0; a < g.size(); ++a) {
        auto idx = g.index(a);
        std::size_t p = g.dim() == 1 ? static_cast<std::size_t>(idx[0] + off)
                                     : static_cast<std::size_t>(idx[0] + off) * static_cast<std::size_t>(np) + static_cast<std::size_t>(idx[1] + off);
        out[static_cast<Eigen::Index>(a)] = buf.data[p][0];
    }
    return out;
}

namespace {

double xi_norm2(const Frequency& f) { return f.xi[0] * f.xi[0] + f.xi[1] * f.xi[1]; }

}  // namespace

Field frac_laplacian_spectral(const Grid& g, const Field& u, double t, int pad) {
    if (!(t > -1.0 && t <= 2.0)) throw Error("frac_laplacian_spectral: order t must lie in (-1, 2]");
    return apply_multiplier(
        g, u,
        [t](const Frequency& f) -> std::complex<double> {
            if (f.zero) return 0.0;
            return std::pow(xi_norm2(f), t);
        },
        pad);
}

double sobolev_norm(const Grid& g, const Field& u, double r) {
    if (!(r >= -2.0 && r <= 2.0)) throw Error("sobolev_norm: r must lie in [-2, 2]");
    const int n = g.n();
    const std::size_t total = g.size();
    Buffer buf(total);
    for (std::size_t i = 0; i < total; ++i) {
        buf.data[i][0] = u[static_cast<Eigen::Index>(i)];
        buf.data[i][1] = 0.0;
    }
    auto plans = PlanCache::instance().get(g.dim(), n);
    fftw_execute_dft(plans.first, buf.data, buf.data);
    double acc = 0.0;
    const int n1 = g.dim() == 2 ? n : 1;
    for (int k0 = 0; k0 < n; ++k0) {
        for (int k1 = 0; k1 < n1; ++k1) {
            const std::size_t p = static_cast<std::size_t>(k0) * static_cast<std::size_t>(n1) + static_cast<std::size_t>(k1);
            const double mag2 = buf.data[p][0] * buf.data[p][0] + buf.data[p][1] * buf.data[p][1];
            const double w = r == 0.0 ? 1.0 : std::pow(1.0 + xi_norm2(frequency_at(g.dim(), n, g.L(), k0, k1)), r);
            acc += w * mag2;
        }
    }
    // Parseval for the unnormalised DFT: sum_x |u|^2 = (1/P) sum_k |u_hat|^2.
    return std::sqrt(g.weight() * acc / static_cast<double>(total));
}

PoincareReport poincare_check(const Grid& g, const Field& u, double t, double s) {
    if (!(t >= 0.0 && t <= s)) throw Error("poincare_check: requires 0 <= t <= s");
    const double scale = u.cwiseAbs().maxCoeff();
    for (auto a : g.exterior_nodes()) {
        if (std::abs(u[static_cast<Eigen::Index>(a)]) > 1e-12 * scale) throw Error("poincare_check: u is not supported in omega");
    }
    PoincareReport rep;
    if (scale == 0.0) return rep;
    rep.lhs = l2_norm(g, frac_laplacian_spectral(g, u, 0.5 * t));
    rep.rhs = l2_norm(g, frac_laplacian_spectral(g, u, 0.5 * s));
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
    return rep;
}

Field derivative(const Grid& g, const Field& u, int axis, int pad) {
    const auto ax = static_cast<std::size_t>(axis);
    return apply_multiplier(
        g, u,
        [ax](const Frequency& f) -> std::complex<double> {
            if (f.nyquist[ax]) return 0.0;
            return {0.0, f.xi[ax]};
        },
        pad);
}

Field second_derivative(const Grid& g, const Field& u, int i, int j, int pad) {
    const auto ai = static_cast<std::size_t>(i);
    const auto aj = static_cast<std::size_t>(j);
    return apply_multiplier(
        g, u,
        [ai, aj](const Frequency& f) -> std::complex<double> {
            if (ai != aj && (f.nyquist[ai] || f.nyquist[aj])) return 0.0;
            return -f.xi[ai] * f.xi[aj];
        },
        pad);
}

Field laplacian(const Grid& g, const Field& u, int pad) {
    return apply_multiplier(
        g, u, [](const Frequency& f) -> std::complex<double> { return -xi_norm2(f); }, pad);
}

ConvolutionKernel::ConvolutionKernel(const Grid& g, const Multiplier& m, int pad)
    : dim_(g.dim()), n_(g.n()), np_(g.n() * pad) {
    const std::size_t total = dim_ == 2 ? static_cast<std::size_t>(np_) * np_ : static_cast<std::size_t>(np_);
    Buffer buf(total);
    for (std::size_t i = 0; i < total; ++i) {
        buf.data[i][0] = 0.0;
        buf.data[i][1] = 0.0;
    }
    buf.data[0][0] = 1.0;
    auto plans = PlanCache::instance().get(dim_, np_);
    fftw_execute_dft(plans.first, buf.data, buf.data);
    const double half = pad * g.L();
    const double norm = 1.0 / static_cast<double>(total);
    const int n1 = dim_ == 2 ? np_ : 1;
    for (int k0 = 0; k0 < np_; ++k0) {
        for (int k1 = 0; k1 < n1; ++k1) {
            const std::size_t p = static_cast<std::size_t>(k0) * static_cast<std::size_t>(n1) + static_cast<std::size_t>(k1);
            const std::complex<double> r = std::complex<double>(buf.data[p][0], buf.data[p][1]) * m(frequency_at(dim_, np_, half, k0, k1)) * norm;
            buf.data[p][0] = r.real();
            buf.data[p][1] = r.imag();
        }
    }
    fftw_execute_dft(plans.second, buf.data, buf.data);
    values_.resize(total);
    for (std::size_t i = 0; i < total; ++i) values_[i] = buf.data[i][0];
}

double ConvolutionKernel::between(std::size_t a, std::size_t b) const {
    auto wrap = [this](int d) { return ((d % np_) + np_) % np_; };
    if (dim_ == 1) return values_[static_cast<std::size_t>(wrap(static_cast<int>(a) - static_cast<int>(b)))];
    const int a0 = static_cast<int>(a) / n_, a1 = static_cast<int>(a) % n_;
    const int b0 = static_cast<int>(b) / n_, b1 = static_cast<int>(b) % n_;
    return values_[static_cast<std::size_t>(wrap(a0 - b0)) * static_cast<std::size_t>(np_) + static_cast<std::size_t>(wrap(a1 - b1))];
}

}  // namespace afc
