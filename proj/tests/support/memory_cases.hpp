#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "tailscope/meta_memory.hpp"

namespace testkit {

struct ProtoCase {
    tailscope::Matrix prototypes;
    tailscope::Matrix f_m;
    tailscope::Matrix g;  // rows on the simplex
    double tau{10.0};
};

// C <= 4, D <= 8, B <= 5, entries of moderate size so the loss is not saturated.
inline ProtoCase random_proto_case(std::mt19937_64& rng, double tau = 10.0) {
    std::uniform_int_distribution<std::size_t> cats(1, 4);
    std::uniform_int_distribution<std::size_t> dims(2, 8);
    std::uniform_int_distribution<std::size_t> batch(1, 5);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    ProtoCase c;
    const std::size_t C = cats(rng), D = dims(rng), B = batch(rng);
    c.tau = tau;
    c.prototypes = tailscope::Matrix(C, D);
    for (double& v : c.prototypes.data) v = normal(rng);
    c.f_m = tailscope::Matrix(B, D);
    for (double& v : c.f_m.data) v = normal(rng);
    c.g = tailscope::Matrix(B, C);
    for (std::size_t i = 0; i < B; ++i) {
        double total = 0.0;
        for (double& v : c.g.row(i)) total += (v = unit(rng));
        for (double& v : c.g.row(i)) v /= total;
    }
    return c;
}

// Central differences of the prototype loss with respect to every entry of M.
inline tailscope::Matrix finite_difference_gradient(const ProtoCase& c, double h) {
    tailscope::Matrix grad(c.prototypes.rows, c.prototypes.cols);
    for (std::size_t i = 0; i < c.prototypes.data.size(); ++i) {
        auto plus = c.prototypes;
        auto minus = c.prototypes;
        plus.data[i] += h;
        minus.data[i] -= h;
        grad.data[i] = (tailscope::proto_loss_at(plus, c.f_m, c.g, c.tau) -
                        tailscope::proto_loss_at(minus, c.f_m, c.g, c.tau)) /
                       (2.0 * h);
    }
    return grad;
}

// ||a - b|| / max(||a||, ||b||); 0 when both vanish.
inline double relative_error(const tailscope::Matrix& a, const tailscope::Matrix& b) {
    double diff = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        diff += (a.data[i] - b.data[i]) * (a.data[i] - b.data[i]);
        na += a.data[i] * a.data[i];
        nb += b.data[i] * b.data[i];
    }
    const double scale = std::sqrt(std::max(na, nb));
    return scale == 0.0 ? 0.0 : std::sqrt(diff) / scale;
}

}  // namespace testkit
