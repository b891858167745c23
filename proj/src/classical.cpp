#include "kerrpair/classical.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kerrpair/errors.hpp"
#include "kerrpair/spectral.hpp"

namespace kerrpair {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kPi = std::numbers::pi;

using State3 = std::array<double, 3>;
using State6 = std::array<double, 6>;

// (a1 N - a2 N - 2 Delta)/2, the rotation rate about L_z at L_z = 0.
double linear_rate(const ModelParams& p) {
    return 0.5 * (p.alpha1 * p.big_n - p.alpha2 * p.big_n - 2.0 * p.delta());
}

State3 rhs3(const State3& l, const ModelParams& p) {
    const double a = p.alpha_sum();
    const double w = linear_rate(p);
    return {-a * l[1] * l[2] - w * l[1],
            a * l[0] * l[2] + w * l[0] - 2.0 * p.g * l[2],
            2.0 * p.g * l[1]};
}

double rate_scale(const ModelParams& p, double radius) {
    return p.alpha_sum() * radius + std::abs(linear_rate(p)) + 2.0 * p.g + 1e-300;
}

double wrapped_difference(double a, double b) {
    double d = std::fmod(a - b, 2.0 * kPi);
    if (d > kPi) d -= 2.0 * kPi;
    if (d < -kPi) d += 2.0 * kPi;
    return std::abs(d);
}

}  // namespace

double sphere_radius(int big_n, RadiusConvention convention) {
    if (big_n < 0) throw DomainError("N must be >= 0");
    const double n = big_n;
    return convention == RadiusConvention::quantum ? 0.5 * std::sqrt(n * (n + 2.0)) : 0.5 * n;
}

double classical_hamiltonian(const ClassicalState& s, const ModelParams& p) {
    const double half_n = 0.5 * p.big_n;
    const double za = s.lz + half_n;
    const double zb = s.lz - half_n;
    return -p.delta() * za + 0.5 * p.alpha1 * za * za + 0.5 * p.alpha2 * zb * zb +
           2.0 * p.g * s.lx + p.omega2 * p.big_n;
}

std::array<double, 3> eom_rhs(const ClassicalState& s, const ModelParams& p) {
    return rhs3({s.lx, s.ly, s.lz}, p);
}

ClassicalState state_on_circle(double theta, double radius) {
    return {radius * std::sin(theta), 0.0, radius * std::cos(theta)};
}

Trajectory integrate_trajectory(const ClassicalState& s0, const ModelParams& p, double t_span,
                                const TrajectoryOptions& options) {
    validate(p);
    if (!(t_span >= 0.0) || !std::isfinite(t_span)) throw DomainError("t_span must be finite and >= 0");
    if (!(options.rtol > 0.0)) throw DomainError("rtol must be > 0");

    std::vector<double> samples = options.sample_times;
    if (samples.empty()) {
        const int n = std::max(options.samples, 1);
        for (int i = 0; i < n; ++i) samples.push_back(n == 1 ? 0.0 : t_span * i / (n - 1));
        samples.back() = n == 1 ? 0.0 : t_span;  // t_span * (n-1)/(n-1) can round up
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i] < 0.0 || samples[i] > t_span || (i > 0 && samples[i] < samples[i - 1])) {
            throw DomainError("sample times must be sorted and inside [0, t_span]");
        }
    }

    const double radius = std::sqrt(s0.l2());
    const double atol = options.atol > 0.0 ? options.atol : options.rtol * std::max(radius, 1e-300);
    const double l2_0 = s0.l2();
    const double h0 = classical_hamiltonian(s0, p);
    const double h_scale = std::max(std::abs(h0), 1e-300);

    Trajectory traj;
    auto record = [&](double t, const State3& x) {
        const ClassicalState s{x[0], x[1], x[2]};
        traj.times.push_back(t);
        traj.states.push_back(s);
        traj.energy.push_back(classical_hamiltonian(s, p));
    };
    auto drift = [&](const State3& x) {
        const ClassicalState s{x[0], x[1], x[2]};
        if (l2_0 > 0.0) traj.l2_drift = std::max(traj.l2_drift, std::abs(s.l2() - l2_0) / l2_0);
        traj.h_drift = std::max(traj.h_drift, std::abs(classical_hamiltonian(s, p) - h0) / h_scale);
    };

    State3 x0{s0.lx, s0.ly, s0.lz};
    std::size_t next = 0;
    while (next < samples.size() && samples[next] <= 0.0) record(samples[next++], x0);
    if (next == samples.size() || t_span == 0.0) return traj;

    auto system = [&p](const State3& x, State3& dxdt, double) { dxdt = rhs3(x, p); };
    auto stepper = odeint::make_dense_output(atol, options.rtol, odeint::runge_kutta_dopri5<State3>());
    stepper.initialize(x0, 0.0, 1e-2 / rate_scale(p, radius));
    State3 x{};
    try {
        while (next < samples.size()) {
            if (traj.steps >= options.max_steps) {
                traj.completed = false;
                traj.diagnostic = "step budget exhausted at t = " + std::to_string(stepper.current_time());
                break;
            }
            const auto [ta, tb] = stepper.do_step(system);
            ++traj.steps;
            if (!(tb - ta > 1e-14 * std::max(1.0, std::abs(tb)))) {
                traj.completed = false;
                traj.diagnostic = "step size underflow at t = " + std::to_string(tb);
                break;
            }
            drift(stepper.current_state());
            while (next < samples.size() && samples[next] <= tb) {
                stepper.calc_state(samples[next], x);
                record(samples[next++], x);
            }
        }
    } catch (const std::exception& e) {
        traj.completed = false;
        traj.diagnostic = std::string("integrator failure: ") + e.what();
    }
    return traj;
}

PeriodAverage period_average(const ClassicalState& s0, const ModelParams& p,
                             const PeriodOptions& options) {
    validate(p);
    const double radius = std::sqrt(s0.l2());
    const auto v = eom_rhs(s0, p);
    const double speed = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (speed <= 1e-12 * rate_scale(p, radius) * std::max(radius, 1.0)) {
        return {0.0, s0.lx, s0.ly, s0.lz};
    }

    auto system = [&p](const State6& x, State6& dxdt, double) {
        const State3 d = rhs3({x[0], x[1], x[2]}, p);
        dxdt = {d[0], d[1], d[2], x[0], x[1], x[2]};
    };
    const double atol = options.rtol * std::max(radius, 1e-300);
    auto stepper = odeint::make_dense_output(atol, options.rtol, odeint::runge_kutta_dopri5<State6>());
    const State6 start{s0.lx, s0.ly, s0.lz, 0.0, 0.0, 0.0};
    stepper.initialize(start, 0.0, 1e-2 / rate_scale(p, radius));

    bool have_first = false;
    double t1 = 0.0;
    State6 first{};
    if (std::abs(s0.ly) <= 1e-13 * radius && v[1] > 0.0) {
        have_first = true;
        first = start;
    }
    State6 prev = start;
    State6 mid{};
    long steps = 0;
    while (true) {
        if (++steps > options.max_steps || stepper.current_time() > options.max_time) {
            std::ostringstream msg;
            msg << "period detection failed: no return to the L_y = 0 section by t = "
                << stepper.current_time() << " (trajectory near the separatrix?)";
            throw NumericalError(msg.str());
        }
        const auto [ta, tb] = stepper.do_step(system);
        const State6 cur = stepper.current_state();
        if (prev[1] < 0.0 && cur[1] >= 0.0) {
            double lo = ta;
            double hi = tb;
            for (int it = 0; it < 100 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
                const double t = 0.5 * (lo + hi);
                stepper.calc_state(t, mid);
                (mid[1] < 0.0 ? lo : hi) = t;
            }
            const double tc = 0.5 * (lo + hi);
            stepper.calc_state(tc, mid);
            if (!have_first) {
                have_first = true;
                t1 = tc;
                first = mid;
            } else {
                const double period = tc - t1;
                return {period, (mid[3] - first[3]) / period, (mid[4] - first[4]) / period,
                        (mid[5] - first[5]) / period};
            }
        }
        prev = cur;
    }
}

const char* label_name(EquilibriumLabel label) noexcept {
    switch (label) {
        case EquilibriumLabel::P1: return "P1";
        case EquilibriumLabel::P2: return "P2";
        case EquilibriumLabel::P3: return "P3";
        case EquilibriumLabel::S: return "S";
    }
    return "?";
}

std::vector<double> equilibrium_angles(double a, double c) {
    // f(t) = sin t + a tan t is monotone between the tan poles and the critical
    // points cos^3 t = -a; h = cos t (f - c) is smooth and changes sign exactly
    // where f - c does on each such piece.
    auto h = [a, c](double t) { return std::sin(t) * std::cos(t) + a * std::sin(t) - c * std::cos(t); };
    std::vector<double> cuts{-kPi, -0.5 * kPi, 0.5 * kPi, kPi};
    if (std::abs(a) <= 1.0) {
        const double tc = std::acos(-std::cbrt(a));
        cuts.push_back(tc);
        cuts.push_back(-tc);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-15; }),
               cuts.end());
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double lo = cuts[i];
        double hi = cuts[i + 1];
        double flo = h(lo);
        const double fhi = h(hi);
        if (flo == 0.0) {
            roots.push_back(lo);
            continue;
        }
        if ((flo < 0.0) == (fhi < 0.0)) continue;
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
            const double m = 0.5 * (lo + hi);
            const double fm = h(m);
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = m;
                flo = fm;
            } else {
                hi = m;
            }
        }
        roots.push_back(0.5 * (lo + hi));
    }
    // -pi and pi are the same point
    std::vector<double> out;
    for (double r : roots) {
        const double t = r <= -kPi ? kPi : r;
        if (std::none_of(out.begin(), out.end(), [t](double u) { return wrapped_difference(t, u) < 1e-12; })) {
            out.push_back(t);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct RawEquilibrium {
    double theta;
    Stability stability;
};

double reduced_a(const ModelParams& p, double radius) {
    return (p.big_n - derived_mu(p)) / (2.0 * radius);
}

std::vector<RawEquilibrium> raw_equilibria(double a, double c, double alpha_sum, double radius,
                                           double g) {
    std::vector<RawEquilibrium> out;
    for (double t : equilibrium_angles(a, c)) {
        const double lx = radius * std::sin(t);
        const double kappa = 2.0 * g / lx;
        // Hessian of H on the tangent plane: -kappa along L_y and
        // (a lx^2 - kappa R^2)/R^2 along the circle; stable when definite.
        const double det = (-kappa) * (alpha_sum * lx * lx - kappa * radius * radius);
        out.push_back({t, det > 0.0 ? Stability::stable : Stability::unstable});
    }
    return out;
}

std::vector<EquilibriumLabel> initial_labels(const std::vector<RawEquilibrium>& eq) {
    std::vector<EquilibriumLabel> labels(eq.size(), EquilibriumLabel::P1);
    std::vector<std::size_t> stable;
    for (std::size_t i = 0; i < eq.size(); ++i) {
        if (eq[i].stability == Stability::unstable) {
            labels[i] = EquilibriumLabel::S;
        } else {
            stable.push_back(i);
        }
    }
    std::sort(stable.begin(), stable.end(), [&](std::size_t x, std::size_t y) {
        return std::abs(eq[x].theta) < std::abs(eq[y].theta);
    });
    const EquilibriumLabel order3[] = {EquilibriumLabel::P1, EquilibriumLabel::P2, EquilibriumLabel::P3};
    for (std::size_t k = 0; k < stable.size() && k < 3; ++k) labels[stable[k]] = order3[k];
    return labels;
}

void check_count(std::size_t count, double c) {
    if (count != 2 && count != 4) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "found " << count << " equilibria at reduced coupling " << c << " (expected 2 or 4)";
        throw NumericalError(msg.str());
    }
}

}  // namespace

std::vector<EquilibriumPoint> find_equilibria(const ModelParams& p, const EquilibriumOptions& options) {
    validate(p);
    if (!(p.g > 0.0)) throw DomainError("find_equilibria needs g > 0 (g = 0 has a continuum)");
    const double mu = derived_mu(p);
    if (!(mu > 0.0)) throw DomainError("find_equilibria needs mu_N > 0");
    if (p.big_n < 1) throw DomainError("find_equilibria needs N >= 1");
    const double radius = sphere_radius(p.big_n, options.radius);
    const double a = reduced_a(p, radius);
    const double alpha = p.alpha_sum();
    const double c = 2.0 * p.g / (alpha * radius);
    const double b_target = beta(p);

    auto raw = raw_equilibria(a, c, alpha, radius, p.g);
    check_count(raw.size(), c);
    std::vector<EquilibriumLabel> labels;

    if (b_target <= options.beta_start) {
        labels = initial_labels(raw);
    } else {
        const double s0 = std::sqrt(options.beta_start / b_target);
        const int steps = std::max(options.continuation_steps, 1);
        std::vector<RawEquilibrium> prev = raw_equilibria(a, c * s0, alpha, radius, p.g * s0);
        check_count(prev.size(), c * s0);
        std::vector<EquilibriumLabel> prev_labels = initial_labels(prev);
        for (int k = 1; k <= steps; ++k) {
            const double s = k == steps ? 1.0 : s0 * std::pow(1.0 / s0, static_cast<double>(k) / steps);
            auto cur = k == steps ? raw : raw_equilibria(a, c * s, alpha, radius, p.g * s);
            check_count(cur.size(), c * s);
            if (cur.size() > prev.size()) {
                throw NumericalError("equilibrium count increased along the continuation path");
            }
            // greedy nearest-theta matching
            struct Cand {
                double d;
                std::size_t i;
                std::size_t j;
            };
            std::vector<Cand> cands;
            for (std::size_t i = 0; i < cur.size(); ++i) {
                for (std::size_t j = 0; j < prev.size(); ++j) {
                    cands.push_back({wrapped_difference(cur[i].theta, prev[j].theta), i, j});
                }
            }
            std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.d < y.d; });
            std::vector<int> match(cur.size(), -1);
            std::vector<char> used(prev.size(), 0);
            for (const auto& cd : cands) {
                if (match[cd.i] >= 0 || used[cd.j]) continue;
                match[cd.i] = static_cast<int>(cd.j);
                used[cd.j] = 1;
            }
            std::vector<EquilibriumLabel> next_labels(cur.size());
            for (std::size_t i = 0; i < cur.size(); ++i) {
                next_labels[i] = prev_labels[static_cast<std::size_t>(match[i])];
            }
            prev = std::move(cur);
            prev_labels = std::move(next_labels);
        }
        labels = prev_labels;
    }

    std::vector<EquilibriumPoint> out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        EquilibriumPoint ep;
        ep.theta = raw[i].theta;
        ep.state = state_on_circle(raw[i].theta, radius);
        ep.stability = raw[i].stability;
        ep.label = labels[i];
        const double t = raw[i].theta;
        ep.residual = std::abs(std::sin(t) + a * std::tan(t) - c) / std::max(1.0, c);
        out.push_back(ep);
    }
    return out;
}

double beta(const ModelParams& p) {
    const double mu = derived_mu(p);
    if (!(mu > 0.0)) throw DomainError("beta needs mu_N > 0");
    const double a = p.alpha_sum();
    return 8.0 * p.g * p.g * p.big_n / (a * a * mu * mu * mu);
}

double beta_crit(double gamma) {
    if (!(gamma >= 1.0)) throw DomainError("beta_crit needs gamma = N/mu >= 1");
    const double d = std::cbrt(gamma * gamma) - std::cbrt((gamma - 1.0) * (gamma - 1.0));
    return 0.5 * gamma * d * d * d;
}

double g_for_beta(const ModelParams& p, double beta_value) {
    const double mu = derived_mu(p);
    if (!(mu > 0.0)) throw DomainError("g_for_beta needs mu_N > 0");
    if (p.big_n < 1) throw DomainError("g_for_beta needs N >= 1");
    if (beta_value < 0.0) throw DomainError("beta must be >= 0");
    const double a = p.alpha_sum();
    return std::sqrt(beta_value * a * a * mu * mu * mu / (8.0 * p.big_n));
}

double g_crit(const ModelParams& p) {
    const double mu = derived_mu(p);
    if (!(mu > 0.0)) throw DomainError("g_crit needs mu_N > 0");
    return g_for_beta(p, beta_crit(p.big_n / mu));
}

int equilibrium_count(double gamma, double beta_value) {
    if (!(gamma > 0.0) || beta_value < 0.0) throw DomainError("need gamma > 0 and beta >= 0");
    // Large-N reduction: a = 1 - 1/gamma, c^2 = 2 beta / gamma^3.
    const double a = 1.0 - 1.0 / gamma;
    const double c = std::sqrt(2.0 * beta_value / (gamma * gamma * gamma));
    return static_cast<int>(equilibrium_angles(a, c).size());
}

double locate_bifurcation(double gamma, double tolerance) {
    double lo = 0.0;
    double hi = 1.0;
    while (equilibrium_count(gamma, hi) > 2) hi *= 2.0;
    lo = std::min(1e-12, hi * 1e-6);
    if (equilibrium_count(gamma, lo) != 4) {
        throw NumericalError("no four-equilibrium regime at small beta for this gamma");
    }
    while (hi - lo > tolerance * std::max(1.0, hi)) {
        const double m = 0.5 * (lo + hi);
        (equilibrium_count(gamma, m) >= 4 ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
}

std::vector<BranchRow> equilibrium_branches(const ModelParams& p, std::span<const double> sqrt_beta_grid,
                                            const EquilibriumOptions& options) {
    std::vector<BranchRow> rows(sqrt_beta_grid.size());
    for (std::size_t i = 0; i < sqrt_beta_grid.size(); ++i) {
        const double sb = sqrt_beta_grid[i];
        if (!(sb > 0.0)) throw DomainError("branch grid needs sqrt(beta) > 0");
        rows[i].sqrt_beta = sb;
        const auto eq = find_equilibria(p.with_g(g_for_beta(p, sb * sb)), options);
        for (const auto& e : eq) rows[i].points[static_cast<std::size_t>(e.label)] = e;
    }
    return rows;
}

double branch_angle(const ClassicalState& s) noexcept {
    return 0.5 * kPi - std::atan(s.lz / std::abs(s.lx));
}

std::vector<QuantumAverage> quantum_averages(const ModelParams& p, LzConvention convention) {
    const Spectrum s = eigendecompose(build_subspace_hamiltonian(p));
    const auto dimless = dimensionless_energies(s, p);
    const double offset = block_energy_offset(p);
    const double sign = convention == LzConvention::schwinger ? 1.0 : -1.0;
    std::vector<QuantumAverage> out(static_cast<std::size_t>(s.dim));
    for (int l = 0; l < s.dim; ++l) {
        QuantumAverage& q = out[static_cast<std::size_t>(l)];
        q.level = l;
        q.energy = s.eigenvalues[static_cast<std::size_t>(l)] + offset;
        q.dimensionless = dimless[static_cast<std::size_t>(l)];
        for (int n = 0; n <= p.big_n; ++n) {
            const double c = s.coefficient(l, n);
            q.lz += sign * c * c * (n - 0.5 * p.big_n);
            if (n < p.big_n) {
                q.lx += s.coefficient(l, n + 1) * c * std::sqrt((n + 1.0) * (p.big_n - n));
            }
        }
    }
    return out;
}

namespace {

double circle_energy(const ModelParams& p, double theta, double radius) {
    return classical_hamiltonian(state_on_circle(theta, radius), p);
}

constexpr int kCircleSamples = 4096;

std::pair<double, double> energy_range(const ModelParams& p, double radius) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = 0; i < kCircleSamples; ++i) {
        const double e = circle_energy(p, -kPi + 2.0 * kPi * i / kCircleSamples, radius);
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    return {lo, hi};
}

std::optional<double> separatrix_energy(const ModelParams& p, RadiusConvention radius) {
    if (!(p.g > 0.0)) return std::nullopt;
    const auto eq = find_equilibria(p, {radius});
    for (const auto& e : eq) {
        if (e.stability == Stability::unstable) return classical_hamiltonian(e.state, p);
    }
    return std::nullopt;
}

}  // namespace

std::vector<ClassicalOrbit> orbits_at_energy(const ModelParams& p, double energy, double radius,
                                             const PeriodOptions& options) {
    auto f = [&](double t) { return circle_energy(p, t, radius) - energy; };
    std::vector<ClassicalOrbit> out;
    double t_prev = -kPi;
    double f_prev = f(t_prev);
    for (int i = 1; i <= kCircleSamples; ++i) {
        const double t = -kPi + 2.0 * kPi * i / kCircleSamples;
        const double ft = f(t);
        if ((f_prev < 0.0) != (ft < 0.0)) {
            double lo = t_prev;
            double hi = t;
            double flo = f_prev;
            for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                const double m = 0.5 * (lo + hi);
                const double fm = f(m);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = m;
                    flo = fm;
                } else {
                    hi = m;
                }
            }
            ClassicalOrbit orbit;
            orbit.theta0 = 0.5 * (lo + hi);
            orbit.energy = energy;
            orbit.average = period_average(state_on_circle(orbit.theta0, radius), p, options);
            out.push_back(orbit);
        }
        t_prev = t;
        f_prev = ft;
    }
    return out;
}

namespace {

// <a|L_z|b> and <a|L_x|b> between real eigenvectors of the block.
double lz_element(const Spectrum& s, int a, int b, int big_n, double sign) {
    double r = 0.0;
    for (int n = 0; n <= big_n; ++n) r += s.coefficient(a, n) * s.coefficient(b, n) * (n - 0.5 * big_n);
    return sign * r;
}

double lx_element(const Spectrum& s, int a, int b, int big_n) {
    double r = 0.0;
    for (int n = 0; n < big_n; ++n) {
        r += 0.5 * (s.coefficient(a, n + 1) * s.coefficient(b, n) + s.coefficient(a, n) * s.coefficient(b, n + 1)) *
             std::sqrt((n + 1.0) * (big_n - n));
    }
    return r;
}

}  // namespace

std::vector<ComparisonRecord> compare_averages(const ModelParams& p, const ComparisonOptions& options) {
    const double radius = sphere_radius(p.big_n, options.radius);
    const auto [h_lo, h_hi] = energy_range(p, radius);
    const auto h_sep = separatrix_energy(p, options.radius);
    const double band = options.separatrix_band * (h_hi - h_lo);
    const auto quantum = quantum_averages(p);
    const Spectrum spec = eigendecompose(build_subspace_hamiltonian(p));
    const int dim = spec.dim;

    std::vector<ComparisonRecord> out(quantum.size());
    for (int l = 0; l < dim; ++l) {
        auto& rec = out[static_cast<std::size_t>(l)];
        rec.quantum = quantum[static_cast<std::size_t>(l)];
        rec.local_lx = rec.quantum.lx;
        rec.local_lz = rec.quantum.lz;
    }
    auto gap = [&](int l) { return spec.eigenvalues[static_cast<std::size_t>(l) + 1] - spec.eigenvalues[static_cast<std::size_t>(l)]; };
    if (options.doublet_ratio > 0.0) {
        for (int l = 0; l + 1 < dim; ++l) {
            const double below = l > 0 ? gap(l - 1) : std::numeric_limits<double>::infinity();
            const double above = l + 2 < dim ? gap(l + 1) : std::numeric_limits<double>::infinity();
            if (!(gap(l) < options.doublet_ratio * std::min(below, above))) continue;
            // rotate the pair onto the eigenbasis of L_z restricted to it
            const double a = lz_element(spec, l, l, p.big_n, 1.0);
            const double b = lz_element(spec, l + 1, l + 1, p.big_n, 1.0);
            const double c = lz_element(spec, l, l + 1, p.big_n, 1.0);
            const double phi = 0.5 * std::atan2(2.0 * c, a - b);
            const double cp = std::cos(phi);
            const double sp = std::sin(phi);
            const double xa = lx_element(spec, l, l, p.big_n);
            const double xb = lx_element(spec, l + 1, l + 1, p.big_n);
            const double xc = lx_element(spec, l, l + 1, p.big_n);
            auto& lo_rec = out[static_cast<std::size_t>(l)];
            auto& hi_rec = out[static_cast<std::size_t>(l) + 1];
            lo_rec.local_lz = cp * cp * a + sp * sp * b + 2.0 * cp * sp * c;
            hi_rec.local_lz = sp * sp * a + cp * cp * b - 2.0 * cp * sp * c;
            lo_rec.local_lx = cp * cp * xa + sp * sp * xb + 2.0 * cp * sp * xc;
            hi_rec.local_lx = sp * sp * xa + cp * cp * xb - 2.0 * cp * sp * xc;
            lo_rec.doublet = hi_rec.doublet = true;
            ++l;
        }
    }
    for_each_index(out.size(), options.exec, [&](std::size_t i) {
        ComparisonRecord& rec = out[i];
        const int l = static_cast<int>(i);
        rec.lz_difference = std::numeric_limits<double>::quiet_NaN();
        rec.classical_lx = rec.classical_lz = std::numeric_limits<double>::quiet_NaN();
        if (h_sep) {
            // a state closer to the saddle energy than its level spacing is not
            // resolved from the separatrix
            double spacing = 0.0;
            if (dim > 1) {
                const int a = std::max(l - 1, 0);
                const int b = std::min(l + 1, dim - 1);
                spacing = (spec.eigenvalues[static_cast<std::size_t>(b)] - spec.eigenvalues[static_cast<std::size_t>(a)]) / (b - a);
            }
            if (std::abs(rec.quantum.energy - *h_sep) <= std::max(band, spacing)) {
                rec.near_separatrix = true;
                return;
            }
        }
        const auto orbits = orbits_at_energy(p, rec.quantum.energy, radius, options.period);
        rec.candidates = static_cast<int>(orbits.size());
        for (const auto& o : orbits) {
            const double d = std::abs(o.average.lz - rec.local_lz);
            if (!(d >= rec.lz_difference)) {
                rec.lz_difference = d;
                rec.classical_lx = o.average.lx;
                rec.classical_lz = o.average.lz;
            }
        }
    });
    return out;
}

std::vector<ScanPoint> classical_energy_scan(const ModelParams& p, int count,
                                             const ComparisonOptions& options) {
    if (count < 1) throw DomainError("energy scan needs count >= 1");
    const double radius = sphere_radius(p.big_n, options.radius);
    const auto [h_lo, h_hi] = energy_range(p, radius);
    const auto h_sep = separatrix_energy(p, options.radius);
    const double band = options.separatrix_band * (h_hi - h_lo);
    const double scale = dimensionless_scale(p);
    const double offset = block_energy_offset(p);

    std::vector<double> energies;
    for (int i = 0; i < count; ++i) {
        // open interval: the extreme energies are equilibria
        const double e = h_lo + (h_hi - h_lo) * (i + 0.5) / count;
        if (h_sep && std::abs(e - *h_sep) <= band) continue;
        energies.push_back(e);
    }
    std::vector<ScanPoint> out(energies.size());
    for_each_index(energies.size(), options.exec, [&](std::size_t i) {
        out[i].energy = energies[i];
        out[i].dimensionless = scale * (energies[i] - offset);
        out[i].orbits = orbits_at_energy(p, energies[i], radius, options.period);
    });
    return out;
}

}  // namespace kerrpair
