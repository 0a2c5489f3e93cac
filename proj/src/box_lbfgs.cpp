#include "floq/box_lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace floq {

namespace {

VecR clip(const VecR& x, const VecR& lo, const VecR& hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
}

// inf-norm of the projected gradient P(x - g) - x; zero exactly at a KKT point.
double projected_grad_norm(const VecR& x, const VecR& g, const VecR& lo, const VecR& hi) {
    return (clip(x - g, lo, hi) - x).cwiseAbs().maxCoeff();
}

struct Pair {
    VecR s, y;
    double rho;
};

}  // namespace

BoxLbfgsResult box_lbfgs_minimize(const BoxObjective& objective, const VecR& x0,
                                  const VecR& lo, const VecR& hi,
                                  const BoxLbfgsOptions& opt) {
    const Eigen::Index n = x0.size();
    if (lo.size() != n || hi.size() != n)
        throw config_error("box_lbfgs: bound sizes do not match x0");
    for (Eigen::Index i = 0; i < n; ++i)
        if (lo[i] > hi[i]) throw config_error("box_lbfgs: lo > hi");

    BoxLbfgsResult res;
    res.x = clip(x0, lo, hi);
    VecR g(n);
    res.f = objective(res.x, g);
    res.history.push_back(res.f);

    std::deque<Pair> mem;
    VecR x_new(n), g_new(n);

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        res.iterations = iter;
        if (projected_grad_norm(res.x, g, lo, hi) < opt.grad_tol) {
            res.converged = true;
            break;
        }

        // Two-loop recursion for d = -H g.
        VecR d = -g;
        std::vector<double> alpha_mem(mem.size());
        for (int i = static_cast<int>(mem.size()) - 1; i >= 0; --i) {
            alpha_mem[i] = mem[i].rho * mem[i].s.dot(d);
            d -= alpha_mem[i] * mem[i].y;
        }
        if (!mem.empty()) {
            const Pair& last = mem.back();
            d *= last.s.dot(last.y) / last.y.squaredNorm();
        }
        for (size_t i = 0; i < mem.size(); ++i) {
            const double beta = mem[i].rho * mem[i].y.dot(d);
            d += (alpha_mem[i] - beta) * mem[i].s;
        }

        // Zero direction components that push against an active bound.
        constexpr double edge = 1e-12;
        for (Eigen::Index i = 0; i < n; ++i) {
            if ((res.x[i] <= lo[i] + edge && d[i] < 0) || (res.x[i] >= hi[i] - edge && d[i] > 0))
                d[i] = 0.0;
        }
        double dg = d.dot(g);
        if (dg >= 0) {  // not a descent direction: restart from projected steepest descent
            mem.clear();
            d = -g;
            for (Eigen::Index i = 0; i < n; ++i) {
                if ((res.x[i] <= lo[i] + edge && d[i] < 0) ||
                    (res.x[i] >= hi[i] - edge && d[i] > 0))
                    d[i] = 0.0;
            }
            dg = d.dot(g);
            if (dg >= 0) {
                res.converged = true;  // no feasible descent direction
                break;
            }
        }

        // Strong-Wolfe search on phi(a) = f(clip(x + a d)); the path derivative
        // sums gradient components of coordinates still free at step a.
        auto eval = [&](double a, double& phi_prime) -> double {
            x_new = clip(res.x + a * d, lo, hi);
            const double f = objective(x_new, g_new);
            phi_prime = 0.0;
            for (Eigen::Index i = 0; i < n; ++i)
                if (x_new[i] > lo[i] + edge && x_new[i] < hi[i] - edge) phi_prime += g_new[i] * d[i];
            return f;
        };

        const double phi0 = res.f, dphi0 = dg;
        double a_prev = 0.0, phi_prev = phi0, dphi_prev = dphi0;
        double a = 1.0;
        double a_acc = -1.0, f_acc = 0.0;
        double a_lo = -1, a_hi = -1, phi_lo = 0, dphi_lo = 0, phi_hi = 0;
        bool bracketed = false;

        for (int ls = 0; ls < opt.max_line_search; ++ls) {
            double dphi;
            const double phi = eval(a, dphi);
            if (phi > phi0 + opt.wolfe_c1 * a * dphi0 || (ls > 0 && phi >= phi_prev)) {
                a_lo = a_prev; phi_lo = phi_prev; dphi_lo = dphi_prev;
                a_hi = a; phi_hi = phi;
                bracketed = true;
                break;
            }
            if (std::abs(dphi) <= -opt.wolfe_c2 * dphi0) {
                a_acc = a; f_acc = phi;
                break;
            }
            if (dphi >= 0) {
                a_lo = a; phi_lo = phi; dphi_lo = dphi;
                a_hi = a_prev; phi_hi = phi_prev;
                bracketed = true;
                break;
            }
            a_prev = a; phi_prev = phi; dphi_prev = dphi;
            a *= 2.0;
        }

        if (bracketed && a_acc < 0) {  // zoom with bisection/interpolation
            for (int z = 0; z < opt.max_line_search; ++z) {
                double mid = 0.5 * (a_lo + a_hi);
                // quadratic interpolation using phi_lo, dphi_lo, phi_hi
                const double denom = phi_hi - phi_lo - dphi_lo * (a_hi - a_lo);
                if (std::abs(denom) > 1e-30) {
                    const double q = a_lo - 0.5 * dphi_lo * (a_hi - a_lo) * (a_hi - a_lo) / denom;
                    const double lo_b = std::min(a_lo, a_hi), hi_b = std::max(a_lo, a_hi);
                    const double margin = 0.1 * (hi_b - lo_b);
                    if (q > lo_b + margin && q < hi_b - margin) mid = q;
                }
                double dphi;
                const double phi = eval(mid, dphi);
                if (phi > phi0 + opt.wolfe_c1 * mid * dphi0 || phi >= phi_lo) {
                    a_hi = mid; phi_hi = phi;
                } else {
                    if (std::abs(dphi) <= -opt.wolfe_c2 * dphi0) {
                        a_acc = mid; f_acc = phi;
                        break;
                    }
                    if (dphi * (a_hi - a_lo) >= 0) {
                        a_hi = a_lo; phi_hi = phi_lo;
                    }
                    a_lo = mid; phi_lo = phi; dphi_lo = dphi;
                }
                if (std::abs(a_hi - a_lo) < 1e-16 * std::max(1.0, std::abs(a_lo))) {
                    if (phi < phi0) { a_acc = mid; f_acc = phi; }
                    break;
                }
            }
            if (a_acc < 0 && phi_lo < phi0 && a_lo > 0) {  // settle for the best Armijo point
                double dphi;
                f_acc = eval(a_lo, dphi);
                a_acc = a_lo;
            }
        }

        if (a_acc < 0) break;  // line search failed; keep best-so-far and stop

        x_new = clip(res.x + a_acc * d, lo, hi);
        const double f_new = objective(x_new, g_new);  // refresh gradient at the accepted point
        const VecR s = x_new - res.x;
        const VecR y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-10 * s.norm() * y.norm()) {
            mem.push_back({s, y, 1.0 / sy});
            if (static_cast<int>(mem.size()) > opt.memory) mem.pop_front();
        }

        const double df = std::abs(res.f - f_new);
        res.x = x_new;
        res.f = f_new;
        g = g_new;
        res.history.push_back(res.f);
        res.iterations = iter + 1;
        if (df < opt.f_tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

}  // namespace floq
