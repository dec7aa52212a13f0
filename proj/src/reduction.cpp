#include "afc/reduction.hpp"

#include "afc/conductivity.hpp"
#include "afc/error.hpp"
#include "afc/parallel.hpp"

#include <cmath>

namespace afc {

namespace {

double xi2(const Frequency& f) { return f.xi[0] * f.xi[0] + f.xi[1] * f.xi[1]; }

Multiplier d_symbol(int dim, double s, int i, int j) {
    const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
    return [=](const Frequency& f) -> std::complex<double> {
        if (i != j && (f.nyquist[ui] || f.nyquist[uj])) return 0.0;
        const double diag = i == j ? xi2(f) : 0.0;
        return (diag + 2.0 * s * f.xi[ui] * f.xi[uj]) / (dim + 2.0 * s);
    };
}

MatrixField map_entries(const Grid& g, const MatrixField& m, const std::function<Multiplier(int, int)>& sym, int pad) {
    MatrixField out(m.nodes(), m.dim);
    for (int i = 0; i < m.dim; ++i)
        for (int j = 0; j < m.dim; ++j) out.set_entry(i, j, apply_multiplier(g, m.entry(i, j), sym(i, j), pad));
    return out;
}

}  // namespace

MatrixField apply_D(const Grid& g, const MatrixField& m, double s, int pad) {
    return map_entries(g, m, [&](int i, int j) { return d_symbol(g.dim(), s, i, j); }, pad);
}

Multiplier riesz_D_symbol(int dim, double s, int i, int j) {
    const Multiplier d = d_symbol(dim, s, i, j);
    return [=](const Frequency& f) -> std::complex<double> {
        if (f.zero) return 0.0;
        return std::pow(xi2(f), s - 1.0) * d(f);
    };
}

Sequence riesz_D(const Grid& g, const Sequence& w, double s, int pad) {
    Sequence out(w.size());
    parallel_for(w.size(), [&](std::size_t k) {
        out[k] = map_entries(g, w[k], [&](int i, int j) { return riesz_D_symbol(g.dim(), s, i, j); }, pad);
    });
    return out;
}

Field tridot(const Sequence& a, const Sequence& b) {
    if (a.size() != b.size()) throw Error("tridot: sequence lengths differ");
    if (a.empty()) return Field();
    Field out = Field::Zero(a.front().values.rows());
    for (std::size_t k = 0; k < a.size(); ++k) out += frobenius(a[k], b[k]);
    return out;
}

Sequence as_sequence(const PhiSequence& phi) {
    Sequence out;
    for (const auto& e : phi.entries) out.push_back(e.field);
    return out;
}

Sequence reduce(const Field& u, const PhiSequence& phi) {
    const Field n2 = phi.norm_sq();
    if (!(n2.minCoeff() > 0.0)) throw Error("reduce: |Phi|^2 vanishes");
    Sequence out;
    for (const auto& e : phi.entries) {
        MatrixField m = e.field;
        for (int c = 0; c < m.dim * m.dim; ++c) m.values.col(c) = m.values.col(c).cwiseProduct(u);
        out.push_back(std::move(m));
    }
    return out;
}

Field unreduce(const Sequence& w, const PhiSequence& phi) {
    const Field n2 = phi.norm_sq();
    if (!(n2.minCoeff() > 0.0)) throw Error("unreduce: |Phi|^2 vanishes");
    return tridot(as_sequence(phi), w).cwiseQuotient(n2);
}

Sequence TransformedPotential::apply(const Sequence& w) const {
    const Field coef = -tridot(w, phi).cwiseQuotient(norm_sq);
    Sequence out = R;
    for (auto& m : out)
        for (int c = 0; c < m.dim * m.dim; ++c) m.values.col(c) = m.values.col(c).cwiseProduct(coef);
    return out;
}

TransformedPotential build_Q(const Grid& g, const PhiSequence& phi, double s, int pad) {
    TransformedPotential q;
    q.phi = as_sequence(phi);
    q.norm_sq = phi.norm_sq();
    if (!(q.norm_sq.minCoeff() > 0.0)) throw Error("build_Q: |Phi|^2 vanishes");
    q.s = s;
    q.pad = pad;
    q.R = riesz_D(g, q.phi, s, pad);
    return q;
}

double transformed_bilinear(const Grid& g, const TransformedPotential& q, const Sequence& w, const Sequence& v) {
    const Sequence rdw = riesz_D(g, w, q.s, q.pad);
    const Sequence wq = q.apply(w);
    return g.weight() * (tridot(rdw, v).sum() + tridot(wq, v).sum());
}

Eigen::MatrixXd transformed_stiffness(const Grid& g, const TransformedPotential& q) {
    const int d = g.dim();
    const std::size_t P = g.size();
    std::vector<ConvolutionKernel> kernels;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) kernels.emplace_back(g, riesz_D_symbol(d, q.s, i, j), q.pad);
    const Field pr = q.phi_dot_R();
    const double w = g.weight();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(P), static_cast<Eigen::Index>(P));
    parallel_for(P, [&](std::size_t a) {
        const auto ia = static_cast<Eigen::Index>(a);
        for (std::size_t b = 0; b < P; ++b) {
            const auto ib = static_cast<Eigen::Index>(b);
            double acc = 0.0;
            for (int c = 0; c < d * d; ++c) {
                const double kab = kernels[static_cast<std::size_t>(c)].between(a, b);
                double phis = 0.0;
                for (const auto& f : q.phi) phis += f.values(ia, c) * f.values(ib, c);
                acc += kab * phis;
            }
            M(ia, ib) = w * acc - (a == b ? w * pr[ia] : 0.0);
        }
    });
    return M;
}

ReductionResidual reduction_identity_residual(const Grid& g, const PhiSequence& phi, double s, const Field& u, const Field& v,
                                              int pad) {
    phi.validate(g);
    const AnisotropyKernel a = kernel_from_phi(g, phi);
    const TransformedPotential q = build_Q(g, phi, s, pad);
    ReductionResidual r;
    r.b_a = bilinear(g, a, s, u, v);
    r.b_q = transformed_bilinear(g, q, reduce(u, phi), reduce(v, phi));
    r.scale = std::sqrt(std::abs(bilinear(g, a, s, u, u)) * std::abs(bilinear(g, a, s, v, v)));
    r.residual = r.scale > 0.0 ? std::abs(r.b_a - r.b_q) / r.scale : std::abs(r.b_a - r.b_q);
    return r;
}

Sequence gauge_closed_form(const Grid& g, const PhiSequence& phi1, const Field& rho, double s, int pad) {
    const Sequence p1 = as_sequence(phi1);
    Sequence rp1 = p1;
    for (auto& m : rp1)
        for (int c = 0; c < m.dim * m.dim; ++c) m.values.col(c) = m.values.col(c).cwiseProduct(rho);
    const Sequence a = riesz_D(g, rp1, s, pad);
    const Sequence b = riesz_D(g, p1, s, pad);
    const Field denom = (1.0 + rho.array()).matrix().cwiseProduct(phi1.norm_sq());
    Sequence out = a;
    for (std::size_t k = 0; k < out.size(); ++k)
        for (int c = 0; c < out[k].dim * out[k].dim; ++c)
            out[k].values.col(c) = (a[k].values.col(c) - rho.cwiseProduct(b[k].values.col(c))).cwiseQuotient(denom);
    return out;
}

double gauge_closed_form_residual(const Grid& g, const PhiSequence& phi1, const Field& rho, double s, int pad) {
    const PhiSequence phi2 = apply_gauge(g, phi1, rho);
    const TransformedPotential q1 = build_Q(g, phi1, s, pad);
    const TransformedPotential q2 = build_Q(g, phi2, s, pad);
    const Sequence G = gauge_closed_form(g, phi1, rho, s, pad);
    const int dd = g.dim() * g.dim();
    double worst = 0.0, peak = 0.0;
    for (std::size_t a = 0; a < g.size(); ++a) {
        const auto ia = static_cast<Eigen::Index>(a);
        for (std::size_t k = 0; k < q1.phi.size(); ++k) {
            for (std::size_t l = 0; l < q1.phi.size(); ++l) {
                for (int c = 0; c < dd; ++c) {
                    for (int e = 0; e < dd; ++e) {
                        const double t1 = -q1.phi[k].values(ia, c) * q1.R[l].values(ia, e) / q1.norm_sq[ia];
                        const double t2 = -q2.phi[k].values(ia, c) * q2.R[l].values(ia, e) / q2.norm_sq[ia];
                        const double closed = q1.phi[k].values(ia, c) * G[l].values(ia, e);
                        peak = std::max(peak, std::abs(t1 - t2));
                        worst = std::max(worst, std::abs((t1 - t2) - closed));
                    }
                }
            }
        }
    }
    return peak > 0.0 ? worst / peak : worst;
}

}  // namespace afc
