#include "kerrpair/symmetry.hpp"

#include <algorithm>
#include <cmath>

#include "kerrpair/errors.hpp"
#include "kerrpair/selfenergy.hpp"
#include "kerrpair/spectral.hpp"

namespace kerrpair {

namespace {

void require_positive_exponent(int big_n, int mu) {
    if (big_n - mu < 1) {
        throw DomainError("T needs N - mu >= 1 (got N=" + std::to_string(big_n) +
                          ", mu=" + std::to_string(mu) + ")");
    }
}

mpq_class abs_q(const mpq_class& q) { return q < 0 ? mpq_class(-q) : q; }

mpz_class binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    mpz_class out;
    mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return out;
}

}  // namespace

LatticeWindow default_window(int big_n, int mu) {
    require_positive_exponent(big_n, mu);
    return {-(big_n + 5), mu + big_n + 5, mu, big_n};
}

BandedExactMatrix::BandedExactMatrix(int lo, int hi, int lower, int upper, mpq_class x)
    : lo_(lo), hi_(hi), lower_(lower), upper_(upper), x_(std::move(x)) {
    if (hi < lo || lower < 0 || upper < 0) throw DomainError("bad banded matrix shape");
    const auto n = static_cast<std::size_t>(hi - lo + 1) * static_cast<std::size_t>(lower + upper + 1);
    coeff_.assign(n, mpq_class(0));
    power_.assign(n, 0);
    xpow_.resize(static_cast<std::size_t>(lower + upper + 3));
    xpow_[0] = 1;
    for (std::size_t k = 1; k < xpow_.size(); ++k) xpow_[k] = xpow_[k - 1] * x_;
}

bool BandedExactMatrix::in_band(int r, int c) const noexcept {
    return r >= lo_ && r <= hi_ && c >= lo_ && c <= hi_ && c - r <= upper_ && r - c <= lower_;
}

std::size_t BandedExactMatrix::slot(int r, int c) const noexcept {
    return static_cast<std::size_t>(r - lo_) * static_cast<std::size_t>(lower_ + upper_ + 1) +
           static_cast<std::size_t>(c - r + lower_);
}

void BandedExactMatrix::set(int r, int c, const mpq_class& coeff, int power) {
    if (!in_band(r, c)) throw DomainError("entry outside the band");
    if (power < 0 || static_cast<std::size_t>(power) >= xpow_.size()) {
        throw DomainError("monomial power outside the supported range");
    }
    coeff_[slot(r, c)] = coeff;
    power_[slot(r, c)] = power;
}

mpq_class BandedExactMatrix::coefficient(int r, int c) const {
    return in_band(r, c) ? coeff_[slot(r, c)] : mpq_class(0);
}

int BandedExactMatrix::power(int r, int c) const {
    return in_band(r, c) ? power_[slot(r, c)] : 0;
}

mpq_class BandedExactMatrix::value(int r, int c) const {
    if (!in_band(r, c)) return 0;
    const auto s = slot(r, c);
    return coeff_[s] * xpow_[static_cast<std::size_t>(power_[s])];
}

BandedExactMatrix multiply(const BandedExactMatrix& a, const BandedExactMatrix& b) {
    if (a.lo() != b.lo() || a.hi() != b.hi()) throw DomainError("window mismatch in product");
    const int size = a.hi() - a.lo();
    BandedExactMatrix out(a.lo(), a.hi(), std::min(a.lower() + b.lower(), size),
                          std::min(a.upper() + b.upper(), size), a.x());
    for (int r = a.lo(); r <= a.hi(); ++r) {
        for (int c = std::max(a.lo(), r - out.lower()); c <= std::min(a.hi(), r + out.upper()); ++c) {
            mpq_class s = 0;
            const int k_lo = std::max({a.lo(), r - a.lower(), c - b.upper()});
            const int k_hi = std::min({a.hi(), r + a.upper(), c + b.lower()});
            for (int k = k_lo; k <= k_hi; ++k) s += a.value(r, k) * b.value(k, c);
            out.set(r, c, s, 0);
        }
    }
    return out;
}

mpz_class taylor_coefficient_T(int k, int big_n, int mu) {
    require_positive_exponent(big_n, mu);
    if (k < 0) throw DomainError("Taylor order must be >= 0");
    return binomial(big_n - mu + k - 1, k);
}

BandedExactMatrix build_T(const LatticeWindow& w, const mpq_class& x) {
    require_positive_exponent(w.big_n, w.mu);
    const int band = w.hi - w.lo;
    BandedExactMatrix t(w.lo, w.hi, 0, band, x);
    std::vector<mpz_class> c(static_cast<std::size_t>(band) + 1);
    for (int k = 0; k <= band; ++k) c[static_cast<std::size_t>(k)] = taylor_coefficient_T(k, w.big_n, w.mu);
    for (int s = w.lo; s <= w.hi; ++s) {
        for (int k = 0; s + k <= w.hi; ++k) t.set(s, s + k, mpq_class(c[static_cast<std::size_t>(k)]), k);
    }
    return t;
}

BandedExactMatrix build_T_inverse(const LatticeWindow& w, const mpq_class& x) {
    require_positive_exponent(w.big_n, w.mu);
    const int e = w.big_n - w.mu;
    const int band = std::min(e, w.hi - w.lo);
    BandedExactMatrix t(w.lo, w.hi, 0, band, x);
    for (int s = w.lo; s <= w.hi; ++s) {
        for (int k = 0; k <= band && s + k <= w.hi; ++k) {
            mpz_class c = binomial(e, k);
            if (k % 2 == 1) c = -c;
            t.set(s, s + k, mpq_class(c), k);
        }
    }
    return t;
}

namespace {

template <class Upper>
BandedExactMatrix build_tridiagonal(const LatticeWindow& w, const mpq_class& x, Upper upper) {
    BandedExactMatrix h(w.lo, w.hi, 1, 1, x);
    for (int s = w.lo; s <= w.hi; ++s) {
        h.set(s, s, mpq_class(mpz_class(s) * (s - w.mu)), 0);
        if (s > w.lo) {
            h.set(s - 1, s, mpq_class(upper(mpz_class(s))), 1);
            h.set(s, s - 1, mpq_class(1), 1);
        }
    }
    return h;
}

}  // namespace

BandedExactMatrix build_H1(const LatticeWindow& w, const mpq_class& x) {
    const int big_n = w.big_n;
    return build_tridiagonal(w, x, [big_n](const mpz_class& s) -> mpz_class {
        return s * (big_n - s + 1);
    });
}

BandedExactMatrix build_H2(const LatticeWindow& w, const mpq_class& x) {
    const int big_n = w.big_n;
    const int mu = w.mu;
    return build_tridiagonal(w, x, [big_n, mu](const mpz_class& s) -> mpz_class {
        return (mu - s + 1) * (big_n - mu + s);
    });
}

mpq_class verify_recurrence(const LatticeWindow& w, int k_max) {
    require_positive_exponent(w.big_n, w.mu);
    if (k_max < 1) throw DomainError("verify_recurrence needs k_max >= 1");
    const int big_n = w.big_n;
    const int mu = w.mu;
    std::vector<mpz_class> c(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) c[static_cast<std::size_t>(k)] = taylor_coefficient_T(k, big_n, mu);
    // k-th Taylor coefficient of T on the infinite lattice
    auto tk = [&](int k, int a, int b) -> mpz_class {
        return b - a == k ? c[static_cast<std::size_t>(k)] : mpz_class(0);
    };
    mpz_class worst = 0;
    for (int k = 0; k < k_max; ++k) {
        for (int s = w.lo + 1; s < w.hi; ++s) {
            for (int sp = w.lo + 1; sp < w.hi; ++sp) {
                const mpz_class lhs = mpz_class(s) * (s - mu) * tk(k + 1, s, sp) +
                                      mpz_class(s + 1) * (big_n - s) * tk(k, s + 1, sp) +
                                      tk(k, s - 1, sp);
                const mpz_class rhs = mpz_class(sp) * (sp - mu) * tk(k + 1, s, sp) +
                                      mpz_class(mu - sp + 1) * (big_n - mu + sp) * tk(k, s, sp - 1) +
                                      tk(k, s, sp + 1);
                const mpz_class d = abs(lhs - rhs);
                if (d > worst) worst = d;
            }
        }
    }
    return mpq_class(worst);
}

IntertwiningResidual verify_intertwining(const LatticeWindow& w, const mpq_class& x,
                                         int edge_margin) {
    if (edge_margin < 0) throw DomainError("edge margin must be >= 0");
    const auto t = build_T(w, x);
    const auto lhs = multiply(build_H1(w, x), t);
    const auto rhs = multiply(t, build_H2(w, x));
    IntertwiningResidual res{0, 0};
    for (int r = w.lo; r <= w.hi; ++r) {
        for (int c = w.lo; c <= w.hi; ++c) {
            const mpq_class d = abs_q(lhs.value(r, c) - rhs.value(r, c));
            const bool interior = r - w.lo >= edge_margin && w.hi - r >= edge_margin &&
                                  c - w.lo >= edge_margin && w.hi - c >= edge_margin;
            mpq_class& slot = interior ? res.interior : res.boundary;
            if (d > slot) slot = d;
        }
    }
    return res;
}

mpq_class verify_T_inverse(const LatticeWindow& w, const mpq_class& x) {
    const auto prod = multiply(build_T(w, x), build_T_inverse(w, x));
    mpq_class worst = 0;
    for (int r = w.lo; r <= w.hi; ++r) {
        for (int c = w.lo; c <= w.hi; ++c) {
            const mpq_class d = abs_q(prod.value(r, c) - (r == c ? mpq_class(1) : mpq_class(0)));
            if (d > worst) worst = d;
        }
    }
    return worst;
}

bool check_T_grading(const BandedExactMatrix& t) {
    if (t.lower() != 0) return false;
    for (int r = t.lo(); r <= t.hi(); ++r) {
        for (int c = r; c <= std::min(t.hi(), r + t.upper()); ++c) {
            if (t.coefficient(r, c) != 0 && t.power(r, c) != c - r) return false;
        }
    }
    return true;
}

SimilarityResidual similarity_check(int big_n, int mu, const mpq_class& x) {
    SimilarityResidual res;
    res.lo = std::max(0, mu - big_n);
    res.hi = std::min(mu, big_n);
    if (res.lo > res.hi) throw DomainError("no sigma with all gamma arguments positive");
    const double xd = x.get_d();
    // Both Hamiltonians scaled by 2/(a1+a2), so couplings g sqrt(...) become x sqrt(...).
    auto log_u = [&](int s) { return 0.5 * (std::lgamma(s + 1.0) - std::lgamma(big_n - s + 1.0)); };
    auto log_v = [&](int s) {
        return 0.5 * (std::lgamma(mu - s + 1.0) - std::lgamma(big_n - mu + s + 1.0));
    };
    const LatticeWindow w{res.lo, res.hi, mu, big_n};
    const auto h1 = build_H1(w, x);
    const auto h2 = build_H2(w, x);
    auto rel = [](double got, double want) {
        const double scale = std::max(std::abs(want), 1e-300);
        return std::abs(got - want) / scale;
    };
    for (int s = res.lo + 1; s <= res.hi; ++s) {
        // physical block: x sqrt(s (N - s + 1)) between s-1 and s
        const double e_phys = xd * std::sqrt(static_cast<double>(s) * (big_n - s + 1));
        const double ratio_u = std::exp(log_u(s) - log_u(s - 1));  // u_s / u_{s-1}
        // (U^{-1} H U)_{s-1,s} = e u_s / u_{s-1};  (U^{-1} H U)_{s,s-1} = e u_{s-1} / u_s
        res.h1 = std::max(res.h1, rel(e_phys * ratio_u, h1.value(s - 1, s).get_d()));
        res.h1 = std::max(res.h1, rel(e_phys / ratio_u, h1.value(s, s - 1).get_d()));
        // mirrored block: x sqrt((mu - s + 1)(N - mu + s)) between s-1 and s
        const double e_mirr = xd * std::sqrt(static_cast<double>(mu - s + 1) * (big_n - mu + s));
        const double ratio_v = std::exp(log_v(s) - log_v(s - 1));
        // (V M V^{-1})_{s-1,s} = e v_{s-1} / v_s
        res.h2 = std::max(res.h2, rel(e_mirr / ratio_v, h2.value(s - 1, s).get_d()));
        res.h2 = std::max(res.h2, rel(e_mirr * ratio_v, h2.value(s, s - 1).get_d()));
    }
    return res;
}

std::vector<PairingRecord> verify_spectral_pairing(const ModelParams& p, int m) {
    validate(p);
    if (!(p.g > 0.0)) throw DomainError("spectral pairing check needs g > 0");
    std::vector<PairingRecord> out;
    for (int n = 0; 2 * n < m; ++n) {
        const int partner = m - n;
        if (partner > p.big_n) continue;
        PairingRecord rec;
        rec.n = n;
        rec.partner = partner;
        rec.order = m - 2 * n;
        rec.splitting = pair_splitting(p, n, m);
        const double gk = std::pow(p.g, rec.order);
        rec.normalized = rec.splitting / gk;
        rec.predicted = 2.0 * rabi_frequency(make_resonant_pair(n, m, p.big_n), p) / gk;
        out.push_back(rec);
    }
    return out;
}

mpq_class parse_rational(const std::string& text) {
    if (text.empty()) throw ConfigError("empty rational");
    const auto slash = text.find('/');
    auto valid_int = [](const std::string& s) {
        if (s.empty()) return false;
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) return false;
        return std::all_of(s.begin() + static_cast<long>(i), s.end(),
                           [](char ch) { return ch >= '0' && ch <= '9'; });
    };
    const std::string num = text.substr(0, slash);
    const std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
    if (!valid_int(num) || !valid_int(den) || den[0] == '-' || den[0] == '+') {
        throw ConfigError("malformed rational '" + text + "' (expected p/q)");
    }
    mpz_class zn(num[0] == '+' ? num.substr(1) : num, 10);
    mpz_class zd(den, 10);
    if (zd == 0) throw ConfigError("zero denominator in '" + text + "'");
    mpq_class q(zn, zd);
    q.canonicalize();
    return q;
}

}  // namespace kerrpair
