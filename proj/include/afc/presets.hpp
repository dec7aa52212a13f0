#pragma once

#include "afc/anisotropy.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace afc {

/// Closed-form kernel families, each delivered as a PhiSequence.
///
/// identity              Phi = {Id}
/// isotropic-separable   Phi = {gamma^{1/2} Id}, gamma = 1 + amplitude * bump in omega
/// diagonal-crystal      Phi = {diag(beta), diag(phi_0 b_0(x), phi_1 b_1(x))}
/// rank-R-random         Phi = {shift Id, b_r(x) S_r : r < rank}, S_r random PSD, b_r random bumps
/// constant              Phi = {C}, C a fixed symmetric matrix (A_s = C (.) C, possibly indefinite)
/// phi-files             Phi read from a manifest (see io.hpp)
struct PresetSpec {
    std::string type = "identity";
    double amplitude = 0.5;
    double fraction = 0.9;
    std::vector<double> beta{1.0, 0.6};
    std::vector<double> phi{0.5, 0.8};
    int rank = 4;
    std::uint64_t seed = 1;
    double shift = 1.0;
    std::vector<double> matrix;  ///< row-major dim x dim, for "constant"
    std::string manifest;
};

PhiSequence build_preset(const Grid& g, const PresetSpec& spec);

/// Lower bound on the smallest eigenvalue of kernel_from_phi(build_preset(...)) that the
/// construction guarantees (the exterior part alone).
double preset_nu(const Grid& g, const PresetSpec& spec);

}  // namespace afc
