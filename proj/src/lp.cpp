#include "kmsspec/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace kms::lp {

namespace {

struct Ops {
    const SparseRows& A;
    std::size_t n, m;

    // y = A x
    std::vector<double> mul(const std::vector<double>& x) const {
        std::vector<double> y(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (auto [j, v] : A.rows[i]) y[i] += v * x[static_cast<std::size_t>(j)];
        return y;
    }
    // x = A^T y
    std::vector<double> tmul(const std::vector<double>& y) const {
        std::vector<double> x(m, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (y[i] == 0.0) continue;
            for (auto [j, v] : A.rows[i]) x[static_cast<std::size_t>(j)] += v * y[i];
        }
        return x;
    }
};

double max_step(const std::vector<double>& v, const std::vector<double>& dv) {
    double a = 1.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (dv[i] < 0) a = std::min(a, -v[i] / dv[i]);
    return a;
}

double inf_norm(const std::vector<double>& v) {
    double r = 0;
    for (double x : v) r = std::max(r, std::abs(x));
    return r;
}

}  // namespace

// Inequality layout: [A x <= hi ; -A x <= -lo ; -x <= 0], slacks s, duals z.
TubeResult solve_tube(const SparseRows& A, const std::vector<double>& lo, const std::vector<double>& hi,
                      const std::vector<double>& cost, int max_iter, double tol) {
    const std::size_t n = A.rows.size(), m = A.cols;
    const std::size_t N = 2 * n + m;
    Ops ops{A, n, m};

    std::vector<double> h(N);
    for (std::size_t i = 0; i < n; ++i) {
        h[i] = hi[i];
        h[n + i] = -lo[i];
    }
    for (std::size_t j = 0; j < m; ++j) h[2 * n + j] = 0.0;

    auto Gx = [&](const std::vector<double>& x) {
        auto ax = ops.mul(x);
        std::vector<double> g(N);
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = ax[i];
            g[n + i] = -ax[i];
        }
        for (std::size_t j = 0; j < m; ++j) g[2 * n + j] = -x[j];
        return g;
    };
    auto Gtz = [&](const std::vector<double>& z) {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = z[i] - z[n + i];
        auto r = ops.tmul(y);
        for (std::size_t j = 0; j < m; ++j) r[j] -= z[2 * n + j];
        return r;
    };

    const double hscale = 1.0 + inf_norm(h);
    const double cscale = 1.0 + inf_norm(cost);

    std::vector<double> x(m, 0.0), s(N), z(N, 1.0);
    {
        auto g = Gx(x);
        for (std::size_t i = 0; i < N; ++i) s[i] = std::max(h[i] - g[i], 0.1);
    }

    const double dual_tol = std::max(tol, 1e-6);
    TubeResult res, best;
    double best_score = std::numeric_limits<double>::infinity();
    best.x = x;
    Eigen::MatrixXd M(m, m);
    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it + 1;
        auto g = Gx(x);
        std::vector<double> rp(N), rd = Gtz(z);
        for (std::size_t i = 0; i < N; ++i) rp[i] = g[i] + s[i] - h[i];
        for (std::size_t j = 0; j < m; ++j) rd[j] += cost[j];
        double mu = 0;
        for (std::size_t i = 0; i < N; ++i) mu += s[i] * z[i];
        mu /= static_cast<double>(N);
        double pobj = 0;
        for (std::size_t j = 0; j < m; ++j) pobj += cost[j] * x[j];

        res.primal_residual = inf_norm(rp) / hscale;
        res.dual_residual = inf_norm(rd) / cscale;
        res.gap = mu * static_cast<double>(N) / (1.0 + std::abs(pobj));
        // dual residual only affects optimality; it stalls near 1e-8 on ill-conditioned kernels
        const double score = std::max({res.primal_residual, 1e-3 * res.dual_residual, res.gap});
        if (score < best_score) {
            best_score = score;
            best = res;
            best.x = x;
        }
        if (res.primal_residual < tol && res.dual_residual < dual_tol && res.gap < tol) {
            best = res;
            best.x = x;
            best.converged = true;
            break;
        }
        if (mu < 1e-18 * hscale) break;

        std::vector<double> d(N);
        for (std::size_t i = 0; i < N; ++i) d[i] = z[i] / s[i];

        M.setZero();
        for (std::size_t i = 0; i < n; ++i) {
            const double w = d[i] + d[n + i];
            const auto& row = A.rows[i];
            for (std::size_t p = 0; p < row.size(); ++p) {
                const double vp = w * row[p].second;
                for (std::size_t q = p; q < row.size(); ++q) M(row[p].first, row[q].first) += vp * row[q].second;
            }
        }
        double trace = 0;
        for (std::size_t j = 0; j < m; ++j) {
            M(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) += d[2 * n + j];
            trace += M(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
        }
        const double reg = 1e-13 * trace / static_cast<double>(std::max<std::size_t>(m, 1));
        for (std::size_t j = 0; j < m; ++j) M(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) += reg;
        Eigen::LLT<Eigen::MatrixXd, Eigen::Upper> llt(M.selfadjointView<Eigen::Upper>());
        if (llt.info() != Eigen::Success) break;

        auto newton = [&](const std::vector<double>& rc, std::vector<double>& dx, std::vector<double>& ds,
                          std::vector<double>& dz) {
            std::vector<double> tmp(N);
            for (std::size_t i = 0; i < N; ++i) tmp[i] = d[i] * rp[i] - rc[i] / s[i];
            auto rhs = Gtz(tmp);
            Eigen::VectorXd b(static_cast<Eigen::Index>(m));
            for (std::size_t j = 0; j < m; ++j) b[static_cast<Eigen::Index>(j)] = -rd[j] - rhs[j];
            Eigen::VectorXd sol = llt.solve(b);
            dx.assign(sol.data(), sol.data() + m);
            auto gdx = Gx(dx);
            dz.resize(N);
            ds.resize(N);
            for (std::size_t i = 0; i < N; ++i) {
                dz[i] = d[i] * (gdx[i] + rp[i]) - rc[i] / s[i];
                ds[i] = -(rc[i] + s[i] * dz[i]) / z[i];
            }
        };

        std::vector<double> rc(N), dx, ds, dz;
        for (std::size_t i = 0; i < N; ++i) rc[i] = s[i] * z[i];
        newton(rc, dx, ds, dz);
        const double ap = max_step(s, ds), ad = max_step(z, dz);
        double mu_aff = 0;
        for (std::size_t i = 0; i < N; ++i) mu_aff += (s[i] + ap * ds[i]) * (z[i] + ad * dz[i]);
        mu_aff /= static_cast<double>(N);
        const double sigma = std::pow(mu_aff / mu, 3.0);

        for (std::size_t i = 0; i < N; ++i) rc[i] = s[i] * z[i] + ds[i] * dz[i] - sigma * mu;
        newton(rc, dx, ds, dz);
        const double step_p = std::min(1.0, 0.99 * max_step(s, ds));
        const double step_d = std::min(1.0, 0.99 * max_step(z, dz));
        for (std::size_t j = 0; j < m; ++j) x[j] += step_p * dx[j];
        for (std::size_t i = 0; i < N; ++i) {
            s[i] += step_p * ds[i];
            z[i] += step_d * dz[i];
        }
    }
    for (double& v : best.x) v = std::max(v, 0.0);
    return best;
}

}  // namespace kms::lp
