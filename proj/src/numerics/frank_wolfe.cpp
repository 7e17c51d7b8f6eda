#include "combipen/numerics/frank_wolfe.hpp"

#include <algorithm>

namespace combipen::numerics {

double SmoothObjective::line_search(const Vector& x, const Vector& dir, double s_max) const {
    // Sign of the directional derivative; points outside the domain count as
    // overshooting.
    const auto slope = [&](double s) {
        const Vector y = x + s * dir;
        if (!std::isfinite(value(y))) return 1.0;
        const double d = gradient(y).dot(dir);
        return std::isnan(d) ? 1.0 : d;
    };
    if (slope(0.0) >= 0.0) return 0.0;
    if (slope(s_max) <= 0.0) return s_max;
    double lo = 0.0, hi = s_max;
    for (int it = 0; it < 60 && hi - lo > 1e-16 * s_max; ++it) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

Vector assemble(const VertexSet& vertices, const std::vector<ActiveAtom>& active) {
    Vector x = Vector::Zero(vertices.dim());
    for (const auto& a : active) vertices.axpy(a.vertex, a.weight, x);
    return x;
}

std::vector<ActiveAtom> normalize_init(std::vector<ActiveAtom> init) {
    std::sort(init.begin(), init.end(), [](const auto& a, const auto& b) { return a.vertex < b.vertex; });
    std::vector<ActiveAtom> out;
    double total = 0.0;
    for (const auto& a : init) {
        require(a.weight >= 0.0, "frank_wolfe: negative initial weight");
        if (a.weight == 0.0) continue;
        if (!out.empty() && out.back().vertex == a.vertex) out.back().weight += a.weight;
        else out.push_back(a);
        total += a.weight;
    }
    require(!out.empty() && std::abs(total - 1.0) <= 1e-9, "frank_wolfe: initial weights must sum to 1");
    for (auto& a : out) a.weight /= total;
    return out;
}

} // namespace

FrankWolfeResult frank_wolfe(const SmoothObjective& f, const VertexSet& vertices,
                             std::vector<ActiveAtom> init, const FrankWolfeOptions& options) {
    FrankWolfeResult res;
    res.active = normalize_init(std::move(init));
    Vector x = assemble(vertices, res.active);
    double fx = f.value(x);
    if (!std::isfinite(fx)) throw InvalidArgument("frank_wolfe: initial point outside the domain");

    for (;;) {
        const Vector g = f.gradient(x);
        const double gx = g.dot(x);
        const int s = vertices.argmin_dot(g);
        const double fw_gap = gx - vertices.dot(s, g);
        res.gap = std::max(fw_gap, 0.0);
        if (res.gap <= std::max(options.abs_gap_tol, options.gap_tol * std::max(1.0, std::abs(fx)))) {
            res.converged = true;
            break;
        }
        if (res.iterations >= options.max_iterations) break;
        ++res.iterations;

        std::size_t away = 0;
        double away_score = -kInf;
        for (std::size_t i = 0; i < res.active.size(); ++i) {
            const double v = vertices.dot(res.active[i].vertex, g);
            if (v > away_score) {
                away_score = v;
                away = i;
            }
        }
        const double away_gap = away_score - gx;
        const bool fw_step = fw_gap >= away_gap || res.active.size() == 1;

        Vector dir = -x;
        double s_max = 1.0;
        if (fw_step) {
            vertices.axpy(s, 1.0, dir);
        } else {
            const double wa = res.active[away].weight;
            dir = x;
            vertices.axpy(res.active[away].vertex, -1.0, dir);
            s_max = wa / (1.0 - wa);
        }
        const double step = f.line_search(x, dir, s_max);
        if (!(step > 0.0)) break;

        if (fw_step) {
            if (step >= 1.0) {
                res.active = {{s, 1.0}};
            } else {
                bool found = false;
                for (auto& a : res.active) {
                    a.weight *= 1.0 - step;
                    if (a.vertex == s) {
                        a.weight += step;
                        found = true;
                    }
                }
                if (!found) res.active.push_back({s, step});
            }
        } else {
            const int drop = res.active[away].vertex;
            for (auto& a : res.active) a.weight *= 1.0 + step;
            res.active[away].weight -= step;
            if (step >= s_max) {
                res.active.erase(std::remove_if(res.active.begin(), res.active.end(),
                                                [drop](const auto& a) { return a.vertex == drop; }),
                                 res.active.end());
            }
        }
        std::erase_if(res.active, [](const auto& a) { return a.weight <= 0.0; });
        if (res.iterations % 64 == 0) {
            double total = 0.0;
            for (const auto& a : res.active) total += a.weight;
            for (auto& a : res.active) a.weight /= total;
            x = assemble(vertices, res.active);
        } else {
            x += step * dir;
        }
        fx = f.value(x);
    }
    res.point = x;
    res.value = fx;
    return res;
}

} // namespace combipen::numerics
