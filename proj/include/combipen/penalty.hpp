#pragma once

#include "combipen/envelopes.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace combipen {

// Warm-start state for repeated proximal calls with nearby anchors.
struct ProxWorkspace {
    std::vector<std::pair<int, double>> alpha;
    long long fw_iterations = 0;
    int unconverged = 0;
};

struct ProxOptions {
    // Inner Frank-Wolfe stops at gap <= gap_tol * max(1, ||v||^2 / 2).
    double gap_tol = 1e-15;
    int max_iterations = 20000;
};

// Phi(c * .) for a spec and atom family, with value and proximal operator.
class Penalty {
public:
    enum class Route { weighted_l1, moment };

    Penalty(PenaltySpec spec, std::shared_ptr<const AtomCollection> atoms, std::string name = {});

    const PenaltySpec& spec() const { return spec_; }
    const AtomCollection& atoms() const { return *atoms_; }
    std::shared_ptr<const AtomCollection> atoms_ptr() const { return atoms_; }
    const std::string& name() const { return name_; }
    Route route() const { return route_; }
    int dim() const { return atoms_->ground_size(); }

    double value(const Vector& w) const;
    CoverCertificate certificate(const Vector& w) const;
    // argmin_z (1/2)||z - v||^2 + t Phi(z).
    Vector prox(const Vector& v, double t, ProxWorkspace* workspace = nullptr,
                const ProxOptions& options = {}) const;
    Penalty with_weights(Vector c) const;

private:
    PenaltySpec spec_;
    std::shared_ptr<const AtomCollection> atoms_;
    std::string name_;
    Route route_;
};

// Named penalties used by the CLI and the experiment harness:
//   l1                            range, homogeneous, p = inf (weighted l1)
//   theta_inf_range               range, non-homogeneous, p = inf, intervals
//   group_l1_linf_modified_range  modified range, homogeneous, p = inf, intervals
//   lasso                         cardinality, homogeneous, p = inf
Penalty make_named_penalty(std::string_view name, int d);

// sum of ||w_G||_inf over the prefix groups {1..k} and the suffix groups
// {k..d}, k >= 2: the closed form of the modified-range l1/l_inf norm.
double group_linf_modified_range(const Vector& w);

} // namespace combipen
