#include "afc/anisotropy.hpp"

#include "afc/error.hpp"
#include "afc/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace afc {

namespace {

std::uint64_t fnv(const void* p, std::size_t n, std::uint64_t h) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 1099511628211ull;
    }
    return h;
}

void check_same(const AnisotropyKernel& a, const AnisotropyKernel& b) {
    if (a.grid_hash != b.grid_hash || a.nodes != b.nodes || a.dim != b.dim) throw Error("kernel: operands live on different grids");
}

std::optional<MatrixField> combine(const std::optional<MatrixField>& a, const std::optional<MatrixField>& b, double cb) {
    if (!a && !b) return std::nullopt;
    if (a && b) {
        MatrixField out = *a;
        out.values += cb * b->values;
        return out;
    }
    if (a) return a;
    MatrixField out = *b;
    out.values *= cb;
    return out;
}

MatrixField transpose_entries(const MatrixField& m) {
    MatrixField t(m.nodes(), m.dim);
    for (int i = 0; i < m.dim; ++i)
        for (int j = 0; j < m.dim; ++j) t.values.col(i * m.dim + j) = m.values.col(j * m.dim + i);
    return t;
}

}  // namespace

AnisotropyKernel::AnisotropyKernel(const Grid& g) : grid_hash(g.hash()), nodes(g.size()), dim(g.dim()) {
    data.assign(nodes * nodes * static_cast<std::size_t>(dim * dim), 0.0);
}

double AnisotropyKernel::max_abs() const {
    double m = 0.0;
    for (double v : data) m = std::max(m, std::abs(v));
    return m;
}

std::uint64_t AnisotropyKernel::hash() const {
    std::uint64_t h = fnv(data.data(), data.size() * sizeof(double), 1469598103934665603ull);
    if (far_out) h = fnv(far_out->values.data(), static_cast<std::size_t>(far_out->values.size()) * sizeof(double), h);
    if (far_in) h = fnv(far_in->values.data(), static_cast<std::size_t>(far_in->values.size()) * sizeof(double), h);
    return h;
}

AnisotropyKernel operator-(const AnisotropyKernel& a, const AnisotropyKernel& b) {
    check_same(a, b);
    AnisotropyKernel out = a;
    for (std::size_t k = 0; k < out.data.size(); ++k) out.data[k] -= b.data[k];
    out.far_out = combine(a.far_out, b.far_out, -1.0);
    out.far_in = combine(a.far_in, b.far_in, -1.0);
    return out;
}

AnisotropyKernel scaled(const AnisotropyKernel& a, double c) {
    AnisotropyKernel out = a;
    for (double& v : out.data) v *= c;
    if (out.far_out) out.far_out->values *= c;
    if (out.far_in) out.far_in->values *= c;
    out.nu = a.nu * c;
    return out;
}

Symmetrization symmetrize(const AnisotropyKernel& a) {
    const std::size_t P = a.nodes;
    const int d = a.dim;
    Symmetrization out{a, a, a, a};
    parallel_for(P, [&](std::size_t x) {
        for (std::size_t y = 0; y < P; ++y) {
            const double* axy = a.at(x, y);
            const double* ayx = a.at(y, x);
            double* ms = out.ms.at(x, y);
            double* vs = out.vs.at(x, y);
            double* as = out.s.at(x, y);
            double* aa = out.a.at(x, y);
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    const int ij = i * d + j, ji = j * d + i;
                    ms[ij] = 0.5 * (axy[ij] + axy[ji]);
                    vs[ij] = 0.5 * (axy[ij] + ayx[ij]);
                    as[ij] = 0.25 * ((axy[ij] + ayx[ij]) + (axy[ji] + ayx[ji]));
                    aa[ij] = axy[ij] - as[ij];
                }
            }
        }
    });
    // Far field: A(x, far) pairs with A(far, x) under the variable swap.
    if (a.far_out || a.far_in) {
        const MatrixField zero(P, d);
        const MatrixField fo = a.far_out ? *a.far_out : zero;
        const MatrixField fi = a.far_in ? *a.far_in : zero;
        MatrixField ms_o = fo, ms_i = fi;
        ms_o.values = 0.5 * (fo.values + transpose_entries(fo).values);
        ms_i.values = 0.5 * (fi.values + transpose_entries(fi).values);
        MatrixField vs = fo;
        vs.values = 0.5 * (fo.values + fi.values);
        MatrixField s = vs;
        s.values = 0.5 * (vs.values + transpose_entries(vs).values);
        out.ms.far_out = ms_o;
        out.ms.far_in = ms_i;
        out.vs.far_out = vs;
        out.vs.far_in = vs;
        out.s.far_out = s;
        out.s.far_in = s;
        MatrixField ao = fo, ai = fi;
        ao.values -= s.values;
        ai.values -= s.values;
        out.a.far_out = ao;
        out.a.far_in = ai;
    }
    return out;
}

PositivityReport check_positivity(const AnisotropyKernel& as, double nu) {
    const std::size_t P = as.nodes;
    const int d = as.dim;
    std::vector<double> rows(P, 0.0);
    parallel_for(P, [&](std::size_t x) {
        double m = 1e300;
        for (std::size_t y = 0; y < P; ++y) {
            const double* v = as.at(x, y);
            double lam;
            if (d == 1) {
                lam = v[0];
            } else {
                const double a = v[0], c = v[3], b = 0.5 * (v[1] + v[2]);
                lam = 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
            }
            m = std::min(m, lam);
        }
        rows[x] = m;
    });
    PositivityReport rep;
    rep.min_rayleigh = *std::min_element(rows.begin(), rows.end());
    // relative slack for round-off in the pointwise eigenvalue
    rep.pass = nu > 0.0 && rep.min_rayleigh >= nu - 1e-12 * std::max(1.0, std::abs(nu));
    return rep;
}

Field PhiSequence::norm_sq() const {
    if (entries.empty()) return Field();
    Field out = Field::Zero(static_cast<Eigen::Index>(entries.front().field.nodes()));
    for (const auto& e : entries) out += e.field.values.rowwise().squaredNorm();
    return out;
}

Eigen::MatrixXd PhiSequence::exterior_value(const Grid& g, std::size_t k) const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    if (entries[k].kind == PhiKind::Phi) return m;
    const std::size_t a = g.exterior_nodes().front();
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = entries[k].field.at(a, i, j);
    return m;
}

void PhiSequence::validate(const Grid& g) const {
    if (entries.empty()) throw Error("phi sequence: empty");
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& f = entries[k].field;
        if (f.nodes() != g.size() || f.dim != g.dim()) throw Error("phi sequence: entry " + std::to_string(k) + " does not match the grid");
        const double scale = std::max(1.0, f.values.cwiseAbs().maxCoeff());
        for (std::size_t a = 0; a < g.size(); ++a) {
            for (int i = 0; i < dim; ++i)
                for (int j = i + 1; j < dim; ++j)
                    if (std::abs(f.at(a, i, j) - f.at(a, j, i)) > 1e-14 * scale)
                        throw Error("phi sequence: entry " + std::to_string(k) + " is not matrix-wise symmetric");
        }
        const std::size_t e0 = g.exterior_nodes().front();
        for (auto a : g.exterior_nodes()) {
            for (int c = 0; c < dim * dim; ++c) {
                const double v = f.values(static_cast<Eigen::Index>(a), c);
                if (entries[k].kind == PhiKind::Beta) {
                    if (std::abs(v - f.values(static_cast<Eigen::Index>(e0), c)) > 1e-14 * scale)
                        throw Error("phi sequence: beta-type entry " + std::to_string(k) + " is not constant on the exterior");
                } else if (v != 0.0) {
                    throw Error("phi sequence: phi-type entry " + std::to_string(k) + " does not vanish on the exterior");
                }
            }
        }
    }
    const Field n2 = norm_sq();
    if (!(n2.minCoeff() > 0.0)) throw Error("phi sequence: |Phi|^2 vanishes at some node");
}

std::vector<MatrixField> PhiSequence::betas() const {
    std::vector<MatrixField> out;
    for (const auto& e : entries)
        if (e.kind == PhiKind::Beta) out.push_back(e.field);
    return out;
}

std::vector<MatrixField> PhiSequence::phis() const {
    std::vector<MatrixField> out;
    for (const auto& e : entries)
        if (e.kind == PhiKind::Phi) out.push_back(e.field);
    return out;
}

PhiSequence interleave(const std::vector<MatrixField>& betas, const std::vector<MatrixField>& phis, std::size_t nodes, int dim) {
    PhiSequence out;
    out.dim = dim;
    const std::size_t k = std::max(betas.size(), phis.size());
    const MatrixField zero(nodes, dim);
    for (std::size_t i = 0; i < k; ++i) {
        out.entries.push_back({PhiKind::Beta, i < betas.size() ? betas[i] : zero});
        if (i < phis.size()) out.entries.push_back({PhiKind::Phi, phis[i]});
    }
    return out;
}

namespace {

AnisotropyKernel hadamard_sum(const Grid& g, const std::vector<const MatrixField*>& fields) {
    AnisotropyKernel out(g);
    const std::size_t P = g.size();
    const int dd = g.dim() * g.dim();
    parallel_for(P, [&](std::size_t x) {
        for (std::size_t y = 0; y < P; ++y) {
            double* o = out.at(x, y);
            for (const MatrixField* f : fields)
                for (int c = 0; c < dd; ++c) o[c] += f->values(static_cast<Eigen::Index>(x), c) * f->values(static_cast<Eigen::Index>(y), c);
        }
    });
    return out;
}

}  // namespace

AnisotropyKernel assemble_exterior(const Grid& g, const std::vector<MatrixField>& betas) {
    std::vector<const MatrixField*> ptrs;
    for (const auto& b : betas) {
        const std::size_t e0 = g.exterior_nodes().front();
        const double scale = std::max(1.0, b.values.cwiseAbs().maxCoeff());
        for (auto a : g.exterior_nodes())
            for (int c = 0; c < b.dim * b.dim; ++c)
                if (std::abs(b.values(static_cast<Eigen::Index>(a), c) - b.values(static_cast<Eigen::Index>(e0), c)) > 1e-14 * scale)
                    throw Error("assemble_exterior: beta is not constant on the exterior");
        ptrs.push_back(&b);
    }
    AnisotropyKernel out = hadamard_sum(g, ptrs);
    MatrixField far(g.size(), g.dim());
    for (const auto& b : betas) {
        const std::size_t e0 = g.exterior_nodes().front();
        for (int c = 0; c < g.dim() * g.dim(); ++c) far.values.col(c) += b.values.col(c) * b.values(static_cast<Eigen::Index>(e0), c);
    }
    out.far_out = far;
    out.far_in = far;
    return out;
}

MercerResult mercer_decompose(const Grid& g, const AnisotropyKernel& as, const AnisotropyKernel& atilde, const MercerOptions& opt) {
    if (as.grid_hash != g.hash() || atilde.grid_hash != g.hash()) throw Error("mercer_decompose: kernel belongs to another grid");
    const int d = g.dim();
    const auto& om = g.interior_nodes();
    const auto m = static_cast<Eigen::Index>(om.size());
    const double w = g.weight();
    MercerResult res;
    std::vector<std::vector<Field>> packed(static_cast<std::size_t>(d * d));

    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            const int c = i * d + j;
            double peak = 0.0, outside = 0.0;
            for (std::size_t x = 0; x < g.size(); ++x) {
                for (std::size_t y = 0; y < g.size(); ++y) {
                    const double v = as.at(x, y)[c] - atilde.at(x, y)[c];
                    peak = std::max(peak, std::abs(v));
                    if (!(g.interior(x) && g.interior(y))) outside = std::max(outside, std::abs(v));
                }
            }
            MercerEntry entry;
            entry.i = i;
            entry.j = j;
            if (peak == 0.0) {
                res.entries.push_back(entry);
                continue;
            }
            if (outside > opt.tol * peak) throw Error("mercer_decompose: psi does not vanish outside omega x omega");
            Eigen::MatrixXd psi(m, m);
            for (Eigen::Index a = 0; a < m; ++a)
                for (Eigen::Index b = 0; b < m; ++b)
                    psi(a, b) = as.at(om[static_cast<std::size_t>(a)], om[static_cast<std::size_t>(b)])[c] -
                                atilde.at(om[static_cast<std::size_t>(a)], om[static_cast<std::size_t>(b)])[c];
            for (Eigen::Index a = 0; a < m; ++a) entry.trace_quadrature += w * psi(a, a);
            // Uniform weights: W^{1/2} psi W^{1/2} = w psi, eigenfunctions e = v / sqrt(w).
            Eigen::MatrixXd sym = 0.5 * w * (psi + psi.transpose());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
            const Eigen::VectorXd& lam = es.eigenvalues();
            entry.trace_spectrum = lam.sum();
            entry.lambda_max = lam.cwiseAbs().maxCoeff();
            std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
            for (Eigen::Index k = 0; k < m; ++k) order[static_cast<std::size_t>(k)] = k;
            std::stable_sort(order.begin(), order.end(), [&](Eigen::Index p, Eigen::Index q) { return lam(p) > lam(q); });
            Eigen::MatrixXd recon = Eigen::MatrixXd::Zero(m, m);
            for (Eigen::Index k : order) {
                if (std::abs(lam(k)) <= opt.tol * entry.lambda_max) continue;
                if (lam(k) < 0.0) {
                    if (opt.strict) throw Error("mercer_decompose: negative eigenvalue, psi is not a Mercer kernel");
                    ++entry.negatives;
                }
                const Eigen::VectorXd e = es.eigenvectors().col(k) / std::sqrt(w);
                recon += lam(k) * e * e.transpose();
                Field full = Field::Zero(static_cast<Eigen::Index>(g.size()));
                for (Eigen::Index a = 0; a < m; ++a) full[static_cast<Eigen::Index>(om[static_cast<std::size_t>(a)])] = e(a);
                entry.eigenvalues.push_back(lam(k));
                entry.eigenfunctions.push_back(full);
                if (lam(k) > 0.0) packed[static_cast<std::size_t>(c)].push_back(std::sqrt(lam(k)) * full);
            }
            entry.reconstruction_residual = (recon - psi).norm() / psi.norm();
            res.max_residual = std::max(res.max_residual, entry.reconstruction_residual);
            res.negatives += entry.negatives;
            res.entries.push_back(std::move(entry));
        }
    }
    std::size_t count = 0;
    for (const auto& p : packed) count = std::max(count, p.size());
    for (std::size_t k = 0; k < count; ++k) {
        MatrixField f(g.size(), d);
        for (int i = 0; i < d; ++i) {
            for (int j = i; j < d; ++j) {
                const auto& list = packed[static_cast<std::size_t>(i * d + j)];
                if (k >= list.size()) continue;
                f.set_entry(i, j, list[k]);
                f.set_entry(j, i, list[k]);
            }
        }
        res.phis.push_back(std::move(f));
    }
    return res;
}

PhiSequence apply_gauge(const Grid& g, const PhiSequence& phi, const Field& rho) {
    if (static_cast<std::size_t>(rho.size()) != g.size()) throw Error("apply_gauge: rho does not match the grid");
    for (auto a : g.exterior_nodes())
        if (rho[static_cast<Eigen::Index>(a)] != 0.0) throw Error("apply_gauge: rho is nonzero on the exterior");
    if (!((1.0 + rho.array()).minCoeff() > 0.0)) throw Error("apply_gauge: 1 + rho must be positive");
    PhiSequence out = phi;
    for (auto& e : out.entries) {
        for (int c = 0; c < e.field.dim * e.field.dim; ++c) {
            e.field.values.col(c) = (1.0 + rho.array()) * e.field.values.col(c).array();
        }
    }
    return out;
}

AnisotropyKernel kernel_from_phi(const Grid& g, const PhiSequence& phi) {
    std::vector<const MatrixField*> ptrs;
    for (const auto& e : phi.entries) ptrs.push_back(&e.field);
    AnisotropyKernel out = hadamard_sum(g, ptrs);
    MatrixField far(g.size(), g.dim());
    for (std::size_t k = 0; k < phi.size(); ++k) {
        const Eigen::MatrixXd ext = phi.exterior_value(g, k);
        for (int i = 0; i < g.dim(); ++i)
            for (int j = 0; j < g.dim(); ++j)
                far.values.col(i * g.dim() + j) += phi.entries[k].field.values.col(i * g.dim() + j) * ext(i, j);
    }
    out.far_out = far;
    out.far_in = far;
    return out;
}

bool exterior_isotropic(const Grid& g, const PhiSequence& phi) {
    for (std::size_t k = 0; k < phi.size(); ++k) {
        if (phi.entries[k].kind != PhiKind::Beta) continue;
        const Eigen::MatrixXd b = phi.exterior_value(g, k);
        const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
        for (int i = 0; i < g.dim(); ++i)
            for (int j = 0; j < g.dim(); ++j) {
                const double expect = i == j ? b(0, 0) : 0.0;
                if (std::abs(b(i, j) - expect) > 1e-14 * scale) return false;
            }
    }
    return true;
}

}  // namespace afc
