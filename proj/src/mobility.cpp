#include "overcon/mobility.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace overcon {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 step
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Eigen::Matrix<double, 7, 1> residual_vector(const Linkage& L, const Configuration& c) {
    Eigen::Matrix<double, 7, 1> f;
    ClosureResidual r = closure_residual(L, c);
    if (r.zero_product) {
        f.setConstant(std::numeric_limits<double>::quiet_NaN());
        return f;
    }
    for (int k = 0; k < 7; ++k) f(k) = r.values[static_cast<std::size_t>(k)];
    return f;
}

Eigen::MatrixXd residual_jacobian(const Linkage& L, const Configuration& c) {
    const std::size_t n = L.size();
    using DQ = DualQuaternion<double>;
    std::vector<DQ> factor(n);
    for (std::size_t k = 0; k < n; ++k) {
        factor[k] = joint_motion(L.joints[k], c[k]) * L.links[k].approx;
    }
    // prefix[k] = factor_0 ... factor_{k-1}; suffix[k] = factor_{k+1} ... factor_{n-1}
    std::vector<DQ> prefix(n + 1, DQ::one()), suffix(n + 1, DQ::one());
    for (std::size_t k = 0; k < n; ++k) prefix[k + 1] = prefix[k] * factor[k];
    for (std::size_t k = n; k-- > 0;) suffix[k] = factor[k] * suffix[k + 1];
    const DQ p = prefix[n];
    const auto pc = p.coords();
    double nrm = coord_norm(p);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(7, static_cast<Eigen::Index>(n));
    if (nrm == 0.0) return J;
    double sigma = 1.0;
    for (double x : pc) {
        if (x != 0.0) {
            sigma = x < 0 ? -1.0 : 1.0;
            break;
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (c[k].infinite) continue;
        const DQ dp = prefix[k] * joint_motion_derivative(L.joints[k], c[k].value) * L.links[k].approx *
                      suffix[k + 1];
        const auto dc = dp.coords();
        double pdp = 0;
        for (std::size_t m = 0; m < 8; ++m) pdp += pc[m] * dc[m];
        for (std::size_t m = 1; m < 8; ++m)
            J(static_cast<Eigen::Index>(m - 1), static_cast<Eigen::Index>(k)) =
                sigma * (dc[m] / nrm - pc[m] * pdp / (nrm * nrm * nrm));
    }
    return J;
}

Eigen::MatrixXd residual_jacobian_fd(const Linkage& L, const Configuration& c, double step) {
    const std::size_t n = L.size();
    Eigen::MatrixXd J(7, static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        Configuration a = c, b = c;
        a[k].value += step;
        b[k].value -= step;
        J.col(static_cast<Eigen::Index>(k)) = (residual_vector(L, a) - residual_vector(L, b)) / (2 * step);
    }
    return J;
}

namespace {

Eigen::VectorXd to_vector(const Configuration& c) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(c.size()));
    for (std::size_t k = 0; k < c.size(); ++k) v(static_cast<Eigen::Index>(k)) = c[k].value;
    return v;
}

Configuration from_vector(const Eigen::VectorXd& v) {
    Configuration c;
    for (Eigen::Index k = 0; k < v.size(); ++k) c.emplace_back(v(k));
    return c;
}

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

std::optional<Configuration> refine_configuration(const Linkage& L, Configuration start, const SolverOptions& opt) {
    Eigen::VectorXd x = to_vector(start);
    Eigen::VectorXd f = residual_vector(L, start);
    if (!finite(f)) return std::nullopt;
    double fn = f.norm();
    double lambda = 1e-3;
    const Eigen::Index n = x.size();
    for (int it = 0; it < opt.max_iterations; ++it) {
        if (fn <= opt.tolerance) return from_vector(x);
        const Eigen::MatrixXd J = residual_jacobian(L, from_vector(x));
        const Eigen::MatrixXd A = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * f;
        bool accepted = false;
        while (lambda < 1e12) {
            Eigen::MatrixXd M = A;
            M.diagonal().array() += lambda;
            const Eigen::VectorXd delta = M.ldlt().solve(-g);
            const Eigen::VectorXd xn = x + delta;
            if (finite(xn) && xn.cwiseAbs().maxCoeff() < 1e6) {
                const Eigen::VectorXd fnew = residual_vector(L, from_vector(xn));
                if (finite(fnew) && fnew.norm() < fn) {
                    x = xn;
                    f = fnew;
                    fn = fnew.norm();
                    lambda = std::max(lambda / 3, 1e-15);
                    accepted = true;
                    break;
                }
            }
            lambda *= 4;
        }
        if (!accepted) break;
    }
    (void)n;
    if (fn <= opt.tolerance) return from_vector(x);
    return std::nullopt;
}

std::optional<Configuration> find_configuration(const Linkage& L, std::uint64_t seed, const SolverOptions& opt) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-opt.start_range, opt.start_range);
    for (int r = 0; r < opt.restarts; ++r) {
        Configuration start;
        for (std::size_t k = 0; k < L.size(); ++k) start.emplace_back(dist(rng));
        if (auto c = refine_configuration(L, start, opt)) return c;
    }
    return std::nullopt;
}

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int r = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k) > rel_tol * s(0)) ++r;
    return r;
}

namespace {

Eigen::MatrixXd null_basis(const Eigen::MatrixXd& J, int rank) {
    const Eigen::Index n = J.cols();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullV);
    return svd.matrixV().rightCols(n - rank);
}

}  // namespace

MobilitySample local_mobility(const Linkage& L, const Configuration& c) {
    MobilitySample s;
    s.config = c;
    const std::size_t n = L.size();
    s.residual_norm = closure_residual(L, c).norm();
    const Eigen::MatrixXd J5 = residual_jacobian_fd(L, c, 1e-5);
    const Eigen::MatrixXd J7 = residual_jacobian_fd(L, c, 1e-7);
    if (!J5.allFinite() || !J7.allFinite()) return s;
    const int r5 = numerical_rank(J5), r7 = numerical_rank(J7);
    s.rank = r5;
    s.null_dim = static_cast<int>(n) - r5;
    s.regular = r5 == r7 && s.residual_norm <= 1e-10;
    s.joint_motion.assign(n, 0.0);
    if (s.null_dim > 0) {
        const Eigen::MatrixXd N = null_basis(J5, r5);
        for (std::size_t k = 0; k < n; ++k) s.joint_motion[k] = N.row(static_cast<Eigen::Index>(k)).norm();
    }
    return s;
}

namespace {

std::optional<MobilitySample> one_sample(const Linkage& L, std::uint64_t seed, const SolverOptions& opt) {
    auto c = find_configuration(L, seed, opt);
    if (!c) return std::nullopt;
    return local_mobility(L, *c);
}

MobilityEstimate summarize(const Linkage& L, std::vector<std::optional<MobilitySample>> samples) {
    MobilityEstimate e;
    e.samples = std::move(samples);
    for (const auto& s : e.samples) {
        if (!s) continue;
        ++e.found_count;
        if (!s->regular) continue;
        ++e.regular_count;
        ++e.histogram[s->null_dim];
    }
    int best = -1, best_count = 0;
    for (const auto& [dim, count] : e.histogram) {
        if (count >= best_count) {
            best = dim;
            best_count = count;
        }
    }
    if (best >= 0) {
        e.mobility = best;
        for (std::size_t k = 0; k < L.size(); ++k) {
            bool moves = false;
            for (const auto& s : e.samples)
                if (s && s->regular && s->null_dim == best && s->joint_motion[k] > 1e-6) moves = true;
            if (!moves) e.frozen_joints.push_back(k);
        }
    }
    return e;
}

}  // namespace

MobilityEstimate mobility_estimate(const Linkage& L, int n_samples, std::uint64_t seed, const SolverOptions& opt) {
    if (n_samples < 1) throw std::invalid_argument("mobility_estimate needs at least one sample");
    std::vector<std::optional<MobilitySample>> samples(static_cast<std::size_t>(n_samples));
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n_samples; ++i)
        samples[static_cast<std::size_t>(i)] = one_sample(L, derive_seed(seed, static_cast<std::uint64_t>(i)), opt);
    return summarize(L, std::move(samples));
}

MobilityEstimate mobility_estimate_serial(const Linkage& L, int n_samples, std::uint64_t seed,
                                          const SolverOptions& opt) {
    if (n_samples < 1) throw std::invalid_argument("mobility_estimate needs at least one sample");
    std::vector<std::optional<MobilitySample>> samples(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i)
        samples[static_cast<std::size_t>(i)] = one_sample(L, derive_seed(seed, static_cast<std::uint64_t>(i)), opt);
    return summarize(L, std::move(samples));
}

Eigen::MatrixXd tangent_basis(const Linkage& L, const Configuration& c, double rel_tol) {
    const Eigen::MatrixXd J = residual_jacobian(L, c);
    return null_basis(J, numerical_rank(J, rel_tol));
}

namespace {

std::optional<Eigen::VectorXd> correct(const Linkage& L, Eigen::VectorXd x) {
    for (int it = 0; it < 30; ++it) {
        const Eigen::VectorXd f = residual_vector(L, from_vector(x));
        if (!finite(f)) return std::nullopt;
        if (f.norm() <= 1e-12) return x;
        const Eigen::MatrixXd J = residual_jacobian(L, from_vector(x));
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-8);
        x -= svd.solve(f);
    }
    const Eigen::VectorXd f = residual_vector(L, from_vector(x));
    if (finite(f) && f.norm() <= 1e-10) return x;
    return std::nullopt;
}

bool parameters_in_domain(const Linkage& L, const Eigen::VectorXd& x) {
    for (std::size_t k = 0; k < L.size(); ++k)
        if (L.joints[k].kind == JointKind::P && std::abs(x(static_cast<Eigen::Index>(k))) < 1e-6) return false;
    return true;
}

}  // namespace

TraceResult trace_curve(const Linkage& L, const Configuration& start, int steps, int direction_index, double step) {
    TraceResult out;
    out.points.push_back(start);
    Eigen::MatrixXd N = tangent_basis(L, start);
    if (N.cols() == 0 || direction_index < 0 || direction_index >= N.cols()) return out;
    const Eigen::Index dim = N.cols();
    Eigen::VectorXd v = N.col(direction_index);
    Eigen::VectorXd x = to_vector(start);
    for (int s = 0; s < steps; ++s) {
        bool advanced = false;
        double h = step;
        for (int tries = 0; tries < 8 && !advanced; ++tries, h *= 0.5) {
            auto y = correct(L, x + h * v);
            if (!y || !parameters_in_domain(L, *y) || (*y - x).norm() > step) continue;
            Eigen::MatrixXd Nn = tangent_basis(L, from_vector(*y));
            if (Nn.cols() != dim) continue;
            Eigen::VectorXd w = Nn * (Nn.transpose() * v);
            if (w.norm() < 0.5) continue;
            v = w / w.norm();
            x = *y;
            advanced = true;
        }
        if (!advanced) {
            out.stopped_early = true;
            break;
        }
        out.points.push_back(from_vector(x));
    }
    return out;
}

}  // namespace overcon
