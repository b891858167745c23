#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kerrpair/classical.hpp"
#include "kerrpair/errors.hpp"
#include "kerrpair/spectral.hpp"

using namespace kerrpair;

namespace {

constexpr double pi = std::numbers::pi;

// Fig. 6 / Fig. 7 oscillators: N = 40, a2/a1 = 0.5, Delta/a1 = 0.25 (mu = 27)
ModelParams fig6(double g) { return ModelParams::from_delta(0.25, 40, 1.0, 0.5, g); }

ClassicalState random_on_sphere(std::mt19937_64& rng, double r) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double z = 2.0 * u(rng) - 1.0;
    const double ph = 2.0 * pi * u(rng);
    const double rho = std::sqrt(1.0 - z * z);
    return {r * rho * std::cos(ph), r * rho * std::sin(ph), r * z};
}

// Root count of sin t + a tan t = c on (-pi, pi) by dense sign scanning, kept away
// from the tan poles. Independent of the library's bracketing.
int scan_root_count(double a, double c) {
    const int n = 200000;
    int count = 0;
    for (int seg = 0; seg < 3; ++seg) {
        const double lo = seg == 0 ? -pi : (seg == 1 ? -pi / 2 : pi / 2);
        const double hi = seg == 0 ? -pi / 2 : (seg == 1 ? pi / 2 : pi);
        double prev = 0.0;
        for (int i = 1; i < n; ++i) {
            const double t = lo + (hi - lo) * i / n;
            const double f = std::sin(t) + a * std::tan(t) - c;
            if (i > 1 && (f < 0) != (prev < 0)) ++count;
            prev = f;
        }
    }
    return count;
}

}  // namespace

TEST_CASE("classical Hamiltonian reduces to the Fock energies at g = 0") {
    ModelParams p;
    p.omega1 = 0.3;
    p.omega2 = 0.8;
    p.alpha1 = 1.0;
    p.alpha2 = 0.6;
    p.g = 0.0;
    p.big_n = 12;
    const ClassicalState top{0.0, 0.0, 6.0};
    CHECK(classical_hamiltonian(top, p) == doctest::Approx(0.3 * 12 + 0.5 * 144));
    // every Fock state sits at L_z = n - N/2
    for (int n = 0; n <= 12; ++n) {
        const ClassicalState s{1.0, 2.0, n - 6.0};
        CHECK(classical_hamiltonian(s, p) == doctest::Approx(unperturbed_energy(n, 12 - n, p)));
    }
    const ClassicalState s{1.5, 2.5, -0.7};
    const ClassicalState mirrored{1.5, -2.5, -0.7};
    CHECK(classical_hamiltonian(s, p.with_g(0.4)) == classical_hamiltonian(mirrored, p.with_g(0.4)));
}

TEST_CASE("equations of motion: displayed form, tangency, L_y = 0 plane") {
    const auto p = ModelParams::from_delta(0.7, 20, 1.0, 0.4, 0.35);
    const double a = p.alpha_sum();
    const double b = 0.5 * (p.alpha1 * 20 - p.alpha2 * 20 - 2.0 * p.delta());
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
        const auto s = random_on_sphere(rng, 10.0);
        const auto d = eom_rhs(s, p);
        CHECK(d[0] == doctest::Approx(-a * s.ly * s.lz - b * s.ly));
        CHECK(d[1] == doctest::Approx(a * s.lx * s.lz + b * s.lx - 2.0 * p.g * s.lz));
        CHECK(d[2] == doctest::Approx(2.0 * p.g * s.ly));
        CHECK(std::abs(s.lx * d[0] + s.ly * d[1] + s.lz * d[2]) <= 1e-12 * 100.0 * (std::abs(a) + std::abs(b) + 1.0));
    }
    const auto d = eom_rhs({3.0, 0.0, -2.0}, p);
    CHECK(d[0] == 0.0);
    CHECK(d[2] == 0.0);
}

TEST_CASE("sphere radius conventions") {
    CHECK(sphere_radius(40, RadiusConvention::quantum) == doctest::Approx(std::sqrt(40.0 * 42.0 / 4.0)));
    CHECK(sphere_radius(40, RadiusConvention::large_n) == 20.0);
}

TEST_CASE("g = 0 from L_z = 0: uniform rotation with period 2 pi / |rate|") {
    const auto p = ModelParams::from_delta(0.25, 40, 1.0, 0.5, 0.0);
    const double rate = 0.5 * (p.alpha1 * 40 - p.alpha2 * 40 - 2.0 * p.delta());
    REQUIRE(rate != 0.0);
    const double period = 2.0 * pi / std::abs(rate);
    const ClassicalState s0{20.0, 0.0, 0.0};
    TrajectoryOptions o;
    o.sample_times = {0.0, period / 4, period / 2, period};
    const auto tr = integrate_trajectory(s0, p, period, o);
    REQUIRE(tr.completed);
    CHECK(std::abs(tr.states[1].lx) < 1e-7);
    CHECK(std::abs(std::abs(tr.states[1].ly) - 20.0) < 1e-7);
    CHECK(tr.states[2].lx == doctest::Approx(-20.0).epsilon(1e-8));
    CHECK(tr.states[3].lx == doctest::Approx(20.0).epsilon(1e-8));
    CHECK(std::abs(tr.states[3].ly) < 1e-7);
    const auto avg = period_average(s0, p);
    CHECK(avg.period == doctest::Approx(period).epsilon(1e-8));
    CHECK(std::abs(avg.lx) < 1e-7);
    CHECK(std::abs(avg.lz) < 1e-12);
}

TEST_CASE("g = 0 circle at L_z = c averages to (0, c)") {
    const auto p = ModelParams::from_delta(0.25, 40, 1.0, 0.5, 0.0);
    const double c = -7.0;
    const ClassicalState s0{std::sqrt(400.0 - c * c), 0.0, c};
    const auto avg = period_average(s0, p);
    CHECK(std::abs(avg.lx) < 1e-6);
    CHECK(std::abs(avg.ly) < 1e-6);
    CHECK(avg.lz == doctest::Approx(c).epsilon(1e-12));
}

TEST_CASE("equilibrium initial conditions stay put") {
    const auto p = fig6(0.1211);
    EquilibriumOptions eo;
    eo.radius = RadiusConvention::quantum;
    for (const auto& e : find_equilibria(p, eo)) {
        const auto tr = integrate_trajectory(e.state, p, 5.0);
        const double r = std::sqrt(e.state.l2());
        if (e.stability == Stability::stable) {
            for (const auto& s : tr.states) {
                CHECK(std::abs(s.lx - e.state.lx) < 1e-6 * r);
                CHECK(std::abs(s.lz - e.state.lz) < 1e-6 * r);
            }
        }
        const auto avg = period_average(e.state, p);
        CHECK(avg.period == 0.0);
        CHECK(avg.lx == doctest::Approx(e.state.lx));
        CHECK(avg.lz == doctest::Approx(e.state.lz));
    }
}

TEST_CASE("Fig. 6 left set: orbits near the poles close after one period") {
    const auto p = fig6(0.1211);
    const double r = sphere_radius(40, RadiusConvention::quantum);
    for (double theta : {0.15, 0.4, pi - 0.15, pi - 0.4}) {
        const auto s0 = state_on_circle(theta, r);
        const auto avg = period_average(s0, p);
        REQUIRE(avg.period > 0.0);
        const auto tr = integrate_trajectory(s0, p, avg.period);
        REQUIRE(tr.completed);
        CHECK(tr.l2_drift < 1e-8);
        CHECK(tr.h_drift < 1e-8);
        const auto& end = tr.states.back();
        CHECK(std::abs(end.lx - s0.lx) < 1e-6 * r);
        CHECK(std::abs(end.ly - s0.ly) < 1e-6 * r);
        CHECK(std::abs(end.lz - s0.lz) < 1e-6 * r);
        // <L_y> vanishes by the L_y -> -L_y symmetry
        CHECK(std::abs(avg.ly) <= 1e-6 * r);
    }
}

TEST_CASE("conservation over 100 periods on random starts") {
    const auto p = fig6(1.816);
    const double r = sphere_radius(40, RadiusConvention::quantum);
    std::mt19937_64 rng(77);
    for (int i = 0; i < 5; ++i) {
        const auto s0 = random_on_sphere(rng, r);
        const auto avg = period_average(s0, p);
        TrajectoryOptions o;
        o.rtol = 1e-12;
        o.samples = 2;
        const auto tr = integrate_trajectory(s0, p, 100.0 * avg.period, o);
        REQUIRE(tr.completed);
        CHECK(tr.l2_drift < 1e-8);
        CHECK(tr.h_drift < 1e-8);
    }
}

TEST_CASE("integrator reports an early stop instead of truncating silently") {
    const auto p = fig6(1.816);
    TrajectoryOptions o;
    o.max_steps = 10;
    const auto tr = integrate_trajectory(state_on_circle(1.0, 20.0), p, 50.0, o);
    CHECK_FALSE(tr.completed);
    CHECK_FALSE(tr.diagnostic.empty());
    CHECK_THROWS_AS((void)integrate_trajectory(state_on_circle(1.0, 20.0), p, -1.0), DomainError);
}

TEST_CASE("beta reproduces the Fig. 6 captions") {
    CHECK(std::sqrt(beta(fig6(0.1211))) == doctest::Approx(0.0103).epsilon(5e-3));
    CHECK(std::sqrt(beta(fig6(1.816))) == doctest::Approx(0.1544).epsilon(5e-4));
    CHECK(beta(fig6(0.0)) == 0.0);
    CHECK(derived_mu(fig6(0.0)) == doctest::Approx(27.0));
    CHECK_THROWS_AS((void)beta(ModelParams::from_mu(-1.0, 10, 1.0, 1.0, 0.1)), DomainError);
}

TEST_CASE("equilibrium counts and labels") {
    EquilibriumOptions eo;
    eo.radius = RadiusConvention::quantum;
    for (double g : {0.1211, 1.816}) {
        const auto eq = find_equilibria(fig6(g), eo);
        REQUIRE(eq.size() == 4);
        int unstable = 0;
        for (const auto& e : eq) {
            unstable += e.stability == Stability::unstable;
            CHECK(e.residual <= 1e-10);
            CHECK(e.theta != 0.0);
            CHECK(e.state.ly == 0.0);
        }
        CHECK(unstable == 1);
    }
    const auto p = fig6(1.0);
    const auto big = find_equilibria(p.with_g(1.2 * g_crit(p)));
    REQUIRE(big.size() == 2);
    for (const auto& e : big) CHECK(e.stability == Stability::stable);
    CHECK_THROWS_AS((void)find_equilibria(p.with_g(0.0)), DomainError);
}

TEST_CASE("theta = 0 is never a root for c > 0") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double a = 2.0 * u(rng) - 0.5;
        const double c = 1e-3 + u(rng);
        for (double t : equilibrium_angles(a, c)) {
            CHECK(t != 0.0);
            CHECK(std::abs(std::sin(t) + a * std::tan(t) - c) <= 1e-10 * std::max(1.0, c));
        }
    }
}

TEST_CASE("root count matches an independent scan") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
        const double a = 0.05 + 0.9 * u(rng);
        const double c = 1.5 * u(rng) + 1e-3;
        CHECK(static_cast<int>(equilibrium_angles(a, c).size()) == scan_root_count(a, c));
    }
}

TEST_CASE("beta_crit closed form") {
    CHECK(beta_crit(1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(beta_crit(1e6) - 4.0 / 27.0) <= 1e-6);
    CHECK(beta_crit(40.0 / 27.0) == doctest::Approx(0.2384).epsilon(1e-3));
    CHECK_THROWS_AS((void)beta_crit(0.99), DomainError);
    // decreasing toward 4/27
    double prev = beta_crit(1.0);
    for (double g = 1.1; g < 1e4; g *= 1.3) {
        CHECK(beta_crit(g) < prev);
        CHECK(beta_crit(g) > 4.0 / 27.0);
        prev = beta_crit(g);
    }
}

TEST_CASE("root-merging beta agrees with the closed form") {
    for (double gamma : {40.0 / 27.0, 2.0, 5.0, 100.0}) {
        CHECK(std::abs(locate_bifurcation(gamma) - beta_crit(gamma)) <= 1e-6);
    }
    // and with a scan-based count on either side
    const double gamma = 2.0;
    const double bc = beta_crit(gamma);
    const double a = 1.0 - 1.0 / gamma;
    auto c_of = [&](double b) { return std::sqrt(2.0 * b / (gamma * gamma * gamma)); };
    CHECK(scan_root_count(a, c_of(bc * (1 - 1e-4))) == 4);
    CHECK(scan_root_count(a, c_of(bc * (1 + 1e-4))) == 2);
    CHECK(equilibrium_count(gamma, bc * (1 - 1e-4)) == 4);
    CHECK(equilibrium_count(gamma, bc * (1 + 1e-4)) == 2);
}

TEST_CASE("g_crit consistency and scaling") {
    const auto p = ModelParams::from_mu(14, 50, 1.0, 1.5, 0.0);
    const double gc = g_crit(p);
    CHECK(std::isfinite(gc));
    CHECK(gc > 0.0);
    CHECK(std::abs(beta(p.with_g(gc)) - beta_crit(50.0 / 14.0)) <= 1e-12);
    // doubling N at fixed mu
    auto q = ModelParams::from_mu(14, 100, 1.0, 1.5, 0.0);
    const double factor = std::sqrt(beta_crit(100.0 / 14.0) / beta_crit(50.0 / 14.0) / 2.0);
    CHECK(g_crit(q) == doctest::Approx(gc * factor).epsilon(1e-12));
    CHECK(g_for_beta(p, beta_crit(50.0 / 14.0)) == doctest::Approx(gc).epsilon(1e-12));
    CHECK_THROWS_AS((void)g_crit(ModelParams::from_mu(14, 10, 1.0, 1.5, 0.0)), DomainError);
}

TEST_CASE("Fig. 8 branches: point 3 merges with S at beta_crit") {
    const auto p = ModelParams::from_delta(2.5, 40, 1.0, 0.5, 0.0);
    REQUIRE(derived_mu(p) == doctest::Approx(30.0));
    const double sbc = std::sqrt(beta_crit(40.0 / 30.0));
    std::vector<double> grid;
    for (int i = 1; i <= 400; ++i) grid.push_back(0.0025 * i);
    const auto rows = equilibrium_branches(p, grid);
    REQUIRE(rows.size() == grid.size());
    const auto p3 = static_cast<std::size_t>(EquilibriumLabel::P3);
    const auto s = static_cast<std::size_t>(EquilibriumLabel::S);
    const auto p1 = static_cast<std::size_t>(EquilibriumLabel::P1);
    const auto p2 = static_cast<std::size_t>(EquilibriumLabel::P2);
    double last_gap = -1.0;
    double first_gap = -1.0;
    for (const auto& r : rows) {
        CHECK(r.points[p1].has_value());
        CHECK(r.points[p2].has_value());
        const bool below = r.sqrt_beta < sbc * (1 - 1e-3);
        const bool above = r.sqrt_beta > sbc * (1 + 1e-3);
        if (below) {
            REQUIRE(r.points[p3].has_value());
            REQUIRE(r.points[s].has_value());
            CHECK(r.points[s]->stability == Stability::unstable);
            const double gap = std::abs(r.points[p3]->theta - r.points[s]->theta);
            if (first_gap < 0) first_gap = gap;
            last_gap = gap;
        }
        if (above) {
            CHECK_FALSE(r.points[p3].has_value());
            CHECK_FALSE(r.points[s].has_value());
        }
    }
    CHECK(last_gap < 0.1 * first_gap);
}

TEST_CASE("branch angle") {
    CHECK(branch_angle({1.0, 0.0, 0.0}) == doctest::Approx(pi / 2));
    CHECK(branch_angle({-1.0, 0.0, 0.0}) == doctest::Approx(pi / 2));
    CHECK(branch_angle({1.0, 0.0, 1.0}) == doctest::Approx(pi / 4));
    CHECK(branch_angle({1e-9, 0.0, -1.0}) == doctest::Approx(pi).epsilon(1e-6));
}

TEST_CASE("quantum averages") {
    // Fock states at g = 0
    const auto f = quantum_averages(ModelParams::from_mu(3.3, 6, 1.0, 1.0, 0.0));
    for (const auto& q : f) CHECK(q.lx == 0.0);
    const auto r = quantum_averages(ModelParams::from_mu(3.3, 6, 1.0, 1.0, 0.0), LzConvention::reversed);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(r[i].lz == -f[i].lz);
    // N = 1 with degenerate diagonal: the eigenstates are (|0> +- |1>)/sqrt 2
    const auto two = quantum_averages(ModelParams::from_mu(1.0, 1, 1.0, 1.0, 0.2));
    REQUIRE(two.size() == 2);
    CHECK(two[0].lx == doctest::Approx(-0.5));
    CHECK(two[1].lx == doctest::Approx(0.5));
    CHECK(std::abs(two[0].lz) < 1e-14);
}

TEST_CASE("Fig. 7 set: quantum and classical <L_z> agree away from the separatrix") {
    const auto p = fig6(1.816);
    const auto recs = compare_averages(p);
    REQUIRE(recs.size() == 41);
    int compared = 0, flagged = 0, doublets = 0;
    double worst = 0.0;
    for (const auto& r : recs) {
        if (r.near_separatrix) {
            ++flagged;
            continue;
        }
        REQUIRE(r.candidates > 0);
        ++compared;
        doublets += r.doublet;
        worst = std::max(worst, r.lz_difference);
        if (!r.doublet) {
            CHECK(r.local_lz == r.quantum.lz);
        }
    }
    CHECK(worst <= 0.05 * 40);
    CHECK(flagged <= 3);
    CHECK(compared >= 38);
    CHECK(doublets >= 6);

    // Without localizing the resonant doublets their members sit half-way
    // between the two wells and match neither orbit.
    ComparisonOptions raw;
    raw.doublet_ratio = 0.0;
    double raw_worst = 0.0;
    for (const auto& r : compare_averages(p, raw)) {
        if (!r.near_separatrix) raw_worst = std::max(raw_worst, r.lz_difference);
    }
    CHECK(raw_worst > 0.05 * 40);
}

TEST_CASE("classical energy scan skips nothing but the separatrix band") {
    const auto p = fig6(1.816);
    const auto scan = classical_energy_scan(p, 40);
    CHECK(scan.size() >= 39);
    for (const auto& s : scan) CHECK_FALSE(s.orbits.empty());
    CHECK_THROWS_AS((void)classical_energy_scan(p, 0), DomainError);
}
