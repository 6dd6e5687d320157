#include "rnr/lbfgs.hpp"

#include <cmath>
#include <cstddef>
#include <deque>

#include "rnr/errors.hpp"

namespace rnr {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

void check_finite(double loss, const std::vector<double>& grad) {
    if (!std::isfinite(loss)) {
        throw NumericError("optimizer: non-finite loss");
    }
    for (double g : grad) {
        if (!std::isfinite(g)) {
            throw NumericError("optimizer: non-finite gradient");
        }
    }
}

}  // namespace

LbfgsResult minimize(const Objective& objective, std::vector<double> x0,
                     const LbfgsConfig& config) {
    const std::size_t n = x0.size();
    LbfgsResult result;
    result.x = std::move(x0);

    std::vector<double> grad(n, 0.0);
    result.loss = objective(result.x, grad);
    check_finite(result.loss, grad);
    result.grad_inf_norm = inf_norm(grad);

    // (s, y) pairs, oldest first.
    std::deque<std::vector<double>> s_hist;
    std::deque<std::vector<double>> y_hist;
    std::deque<double> rho_hist;

    std::vector<double> direction(n), x_next(n), grad_next(n), alpha_hist;

    for (int iter = 0; iter < config.max_iter; ++iter) {
        if (result.grad_inf_norm < config.tol) {
            result.converged = true;
            break;
        }

        // Two-loop recursion: direction = -H·grad.
        direction = grad;
        alpha_hist.assign(s_hist.size(), 0.0);
        for (std::size_t k = s_hist.size(); k-- > 0;) {
            double a = rho_hist[k] * dot(s_hist[k], direction);
            alpha_hist[k] = a;
            for (std::size_t i = 0; i < n; ++i) direction[i] -= a * y_hist[k][i];
        }
        if (!s_hist.empty()) {
            double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
            for (double& d : direction) d *= gamma;
        }
        for (std::size_t k = 0; k < s_hist.size(); ++k) {
            double b = rho_hist[k] * dot(y_hist[k], direction);
            for (std::size_t i = 0; i < n; ++i) direction[i] += (alpha_hist[k] - b) * s_hist[k][i];
        }
        for (double& d : direction) d = -d;

        double descent = dot(grad, direction);
        if (descent >= 0.0) {
            // Curvature information went stale; fall back to steepest descent.
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];
            descent = dot(grad, direction);
            if (descent >= 0.0) break;  // gradient is exactly zero
        }

        // Armijo backtracking.
        double step = 1.0;
        double loss_next = result.loss;
        bool accepted = false;
        for (int ls = 0; ls < config.max_line_search; ++ls) {
            for (std::size_t i = 0; i < n; ++i) x_next[i] = result.x[i] + step * direction[i];
            loss_next = objective(x_next, grad_next);
            check_finite(loss_next, grad_next);
            if (loss_next <= result.loss + config.armijo_c1 * step * descent) {
                accepted = true;
                break;
            }
            step *= config.backtrack;
        }
        if (!accepted) break;  // no further progress representable

        // Curvature update; skip the pair when s·y is not safely positive.
        std::vector<double> s(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_next[i] - result.x[i];
            y[i] = grad_next[i] - grad[i];
        }
        double sy = dot(s, y);
        if (sy > 1e-12) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > config.history) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }

        result.x.swap(x_next);
        grad.swap(grad_next);
        result.loss = loss_next;
        result.grad_inf_norm = inf_norm(grad);
        result.iterations = iter + 1;
    }

    if (!result.converged) {
        result.converged = result.grad_inf_norm < config.tol;
    }
    return result;
}

}  // namespace rnr
