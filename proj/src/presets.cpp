#include "afc/presets.hpp"

#include "afc/error.hpp"
#include "afc/io.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace afc {

namespace {

double omega_half_width(const Grid& g) {
    double half = 1e300;
    for (int a = 0; a < g.dim(); ++a) {
        const auto ua = static_cast<std::size_t>(a);
        half = std::min(half, 0.5 * (g.config().omega.hi[ua] - g.config().omega.lo[ua]));
    }
    return half;
}

std::array<double, 2> omega_centre(const Grid& g) {
    std::array<double, 2> c{0.0, 0.0};
    for (int a = 0; a < g.dim(); ++a) {
        const auto ua = static_cast<std::size_t>(a);
        c[ua] = 0.5 * (g.config().omega.lo[ua] + g.config().omega.hi[ua]);
    }
    return c;
}

}  // namespace

PhiSequence build_preset(const Grid& g, const PresetSpec& spec) {
    const int d = g.dim();
    const std::size_t P = g.size();
    PhiSequence out;
    out.dim = d;
    if (spec.type == "identity") {
        out.entries.push_back({PhiKind::Beta, MatrixField::scaled_identity(Field::Ones(static_cast<Eigen::Index>(P)), d)});
    } else if (spec.type == "isotropic-separable") {
        const Field gamma = Field::Ones(static_cast<Eigen::Index>(P)) + spec.amplitude * omega_bump(g, spec.fraction);
        if (!(gamma.minCoeff() > 0.0)) throw ConfigError("isotropic-separable: gamma must stay positive");
        out.entries.push_back({PhiKind::Beta, MatrixField::scaled_identity(gamma.cwiseSqrt(), d)});
    } else if (spec.type == "diagonal-crystal") {
        if (static_cast<int>(spec.beta.size()) < d || static_cast<int>(spec.phi.size()) < d)
            throw ConfigError("diagonal-crystal: beta and phi need one value per axis");
        MatrixField beta(P, d), phi(P, d);
        const double half = omega_half_width(g);
        auto c0 = omega_centre(g);
        auto c1 = c0;
        c1[0] += 0.2 * half;
        const Field b0 = bump(g, c0, 0.8 * half);
        const Field b1 = bump(g, c1, 0.6 * half);
        for (int i = 0; i < d; ++i) {
            beta.values.col(i * d + i).setConstant(spec.beta[static_cast<std::size_t>(i)]);
            phi.set_entry(i, i, spec.phi[static_cast<std::size_t>(i)] * (i == 0 ? b0 : b1));
        }
        out.entries.push_back({PhiKind::Beta, beta});
        out.entries.push_back({PhiKind::Phi, phi});
    } else if (spec.type == "rank-R-random") {
        if (spec.rank < 1 || spec.rank > 64) throw ConfigError("rank-R-random: rank must lie in [1, 64]");
        std::mt19937_64 rng(spec.seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        const double half = omega_half_width(g);
        const auto c0 = omega_centre(g);
        std::vector<MatrixField> phis;
        for (int r = 0; r < spec.rank; ++r) {
            std::array<double, 2> c = c0;
            for (int a = 0; a < d; ++a) c[static_cast<std::size_t>(a)] += 0.3 * half * unit(rng);
            const double radius = half * (0.5 + 0.15 * unit(rng));
            const Field b = bump(g, c, radius);
            Eigen::MatrixXd G(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) G(i, j) = unit(rng);
            const Eigen::MatrixXd S = G * G.transpose() / d + 0.1 * Eigen::MatrixXd::Identity(d, d);
            MatrixField f(P, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) f.set_entry(i, j, S(i, j) * b);
            phis.push_back(std::move(f));
        }
        std::vector<MatrixField> betas{MatrixField::scaled_identity(spec.shift * Field::Ones(static_cast<Eigen::Index>(P)), d)};
        out = interleave(betas, phis, P, d);
    } else if (spec.type == "constant") {
        if (spec.matrix.size() != static_cast<std::size_t>(d * d)) throw ConfigError("constant: matrix needs dim * dim entries");
        Eigen::MatrixXd C(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) C(i, j) = spec.matrix[static_cast<std::size_t>(i * d + j)];
        out.entries.push_back({PhiKind::Beta, MatrixField::constant(P, C)});
    } else if (spec.type == "phi-files") {
        out = read_phi_manifest(g, spec.manifest);
    } else {
        throw ConfigError("unknown kernel preset '" + spec.type + "'");
    }
    out.validate(g);
    return out;
}

double preset_nu(const Grid& g, const PresetSpec& spec) {
    if (spec.type == "identity") return 1.0;
    if (spec.type == "isotropic-separable") return std::min(1.0, 1.0 + std::min(0.0, spec.amplitude));
    if (spec.type == "diagonal-crystal") {
        double m = 1e300;
        for (int i = 0; i < g.dim(); ++i) m = std::min(m, spec.beta[static_cast<std::size_t>(i)] * spec.beta[static_cast<std::size_t>(i)]);
        return m;
    }
    if (spec.type == "rank-R-random") return spec.shift * spec.shift;
    if (spec.type == "constant") {
        const int d = g.dim();
        Eigen::MatrixXd C(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) C(i, j) = spec.matrix[static_cast<std::size_t>(i * d + j)] * spec.matrix[static_cast<std::size_t>(i * d + j)];
        return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(C).eigenvalues().minCoeff();
    }
    return 0.0;
}

}  // namespace afc
