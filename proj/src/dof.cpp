#include "hbdof/dof.hpp"

#include <algorithm>
#include <tuple>

namespace hbdof {

namespace {

void validate_symmetric_args(int k, int m_rf, int m_ant, int n_rf, int n_ant) {
    if (k < 1) throw std::invalid_argument("K must be >= 1");
    validate_profile(UserProfile{m_rf, m_ant, n_rf, n_ant}, 0);
}

int antenna_ratio(int m_ant, int n_ant) { return std::max(m_ant, n_ant) / std::min(m_ant, n_ant); }

// mpq_class(num, den) does not reduce; keep every stored Rat canonical
Rat make_rat(long num, long den) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

BigInt pow_big(long base, const BigInt& exp) {
    if (exp < 0) throw std::invalid_argument("negative exponent");
    if (!exp.fits_ulong_p()) {
        throw std::invalid_argument("extension_plan: exponent too large to materialize");
    }
    BigInt out;
    mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(base),
                  exp.get_ui());
    return out;
}

}  // namespace

int dof_ptp(int m_rf, int m_ant, int n_rf, int n_ant) {
    validate_profile(UserProfile{m_rf, m_ant, n_rf, n_ant}, 0);
    return std::min(m_rf, n_rf);
}

int dof_mac(const std::vector<int>& m_rfs, int n_rf) {
    if (m_rfs.empty()) throw std::invalid_argument("dof_mac: no transmitters");
    int sum = 0;
    for (int m : m_rfs) sum += m;
    return std::min(sum, n_rf);
}

int dof_bc(int m_rf, const std::vector<int>& n_rfs) {
    if (n_rfs.empty()) throw std::invalid_argument("dof_bc: no receivers");
    int sum = 0;
    for (int n : n_rfs) sum += n;
    return std::min(m_rf, sum);
}

int dof_two_user(const NetworkConfig& cfg) {
    cfg.validate();
    if (cfg.size() != 2) throw std::invalid_argument("dof_two_user: K must be 2");
    const UserProfile& u1 = cfg.users[0];
    const UserProfile& u2 = cfg.users[1];
    return std::min({u1.m_rf + u2.m_rf, u1.n_rf + u2.n_rf, u1.m_rf + u2.n_rf, u2.m_rf + u1.n_rf,
                     std::max(u1.m_ant, u2.n_ant), std::max(u2.m_ant, u1.n_ant)});
}

bool allocation_feasible(const NetworkConfig& cfg, const TwoUserAllocation& a) {
    if (cfg.size() != 2) throw std::invalid_argument("allocation_feasible: K must be 2");
    const UserProfile& u1 = cfg.users[0];
    const UserProfile& u2 = cfg.users[1];
    const bool nonneg = a.d1 >= 0 && a.d11 >= 0 && a.d10 >= 0 && a.d2 >= 0 && a.d22 >= 0 &&
                        a.d20 >= 0;
    return nonneg && a.d1 == a.d11 + a.d10 && a.d2 == a.d22 + a.d20 &&
           a.d1 <= std::min(u1.m_rf, u1.n_rf) && a.d2 <= std::min(u2.m_rf, u2.n_rf) &&
           a.d11 <= std::max(0, u1.m_ant - u2.n_ant) &&
           a.d22 <= std::max(0, u2.m_ant - u1.n_ant) && a.d1 + a.d20 <= u1.n_ant &&
           a.d2 + a.d10 <= u2.n_ant;
}

TwoUserAllocation alloc_two_user(const NetworkConfig& cfg) {
    cfg.validate();
    if (cfg.size() != 2) throw std::invalid_argument("alloc_two_user: K must be 2");
    const UserProfile& u1 = cfg.users[0];
    const UserProfile& u2 = cfg.users[1];
    const int cap1 = std::min(u1.m_rf, u1.n_rf);
    const int cap2 = std::min(u2.m_rf, u2.n_rf);
    const int null1 = std::min(cap1, std::max(0, u1.m_ant - u2.n_ant));
    const int null2 = std::min(cap2, std::max(0, u2.m_ant - u1.n_ant));

    TwoUserAllocation best;
    auto score = [](const TwoUserAllocation& a) {
        return std::make_tuple(a.d1 + a.d2, a.d11 + a.d22, a.d1);
    };
    for (int d11 = 0; d11 <= null1; ++d11) {
        for (int d10 = 0; d10 + d11 <= cap1; ++d10) {
            for (int d22 = 0; d22 <= null2; ++d22) {
                for (int d20 = 0; d20 + d22 <= cap2; ++d20) {
                    const TwoUserAllocation a{d11 + d10, d11, d10, d22 + d20, d22, d20};
                    if (a.d1 + a.d20 > u1.n_ant || a.d2 + a.d10 > u2.n_ant) continue;
                    if (score(a) > score(best)) best = a;
                }
            }
        }
    }
    return best;
}

DofBounds dof_k_user_bounds(int k, int m_rf, int m_ant, int n_rf, int n_ant) {
    validate_symmetric_args(k, m_rf, m_ant, n_rf, n_ant);
    const int r = antenna_ratio(m_ant, n_ant);
    const int dmin = std::min(m_rf, n_rf);
    // zero-forcing regime: K*min{M,N} streams fit on whichever side has the
    // larger antenna array (K <= R is the special case K*min{M',N'} <= max).
    // Here the per-user PTP converse matches, so both bounds agree.
    if (k * dmin <= std::max(m_ant, n_ant)) return {Rat(k) * dmin, Rat(k) * dmin, r};
    // alignment regime. The per-user cap (R/(R+1))*min{M',N'} is not monotone
    // across ratio boundaries, but any sub-array remains usable, so the
    // achievable cap is its maximum over sub-arrays that still fit the RF
    // chains.
    Rat ia_cap = 0;
    for (int mp = m_rf; mp <= m_ant; ++mp) {
        for (int np = n_rf; np <= n_ant; ++np) {
            const int rr = antenna_ratio(mp, np);
            ia_cap = std::max(ia_cap,
                              make_rat(static_cast<long>(rr) * std::min(mp, np), rr + 1));
        }
    }
    const Rat lower = Rat(k) * std::min(Rat(dmin), ia_cap);
    const Rat cut = make_rat(std::max(m_ant, n_ant), r + 1);
    const Rat upper = Rat(k) * std::min(Rat(dmin), cut);
    return {lower, upper, r};
}

Rat hybrid_gain_ratio(const NetworkConfig& cfg) {
    cfg.validate();
    const NetworkConfig digital = cfg.full_digital();
    Rat hybrid, full;
    if (cfg.size() == 1) {
        const UserProfile& u = cfg.users[0];
        hybrid = dof_ptp(u.m_rf, u.m_ant, u.n_rf, u.n_ant);
        full = dof_ptp(u.m_rf, u.m_rf, u.n_rf, u.n_rf);
    } else if (cfg.size() == 2) {
        hybrid = dof_two_user(cfg);
        full = dof_two_user(digital);
    } else {
        if (!cfg.is_symmetric()) {
            throw std::invalid_argument("hybrid_gain_ratio: K >= 3 requires a symmetric config");
        }
        const UserProfile& u = cfg.users[0];
        hybrid = dof_k_user_bounds(cfg.size(), u.m_rf, u.m_ant, u.n_rf, u.n_ant).lower;
        full = dof_k_user_bounds(cfg.size(), u.m_rf, u.m_rf, u.n_rf, u.n_rf).lower;
    }
    if (full == 0) {
        if (hybrid == 0) return 0;
        throw std::domain_error("hybrid_gain_ratio: full-digital DoF is zero");
    }
    return hybrid / full;
}

Rat extension_limit(int k, int m_rf, int m_ant, int n_rf, int n_ant) {
    validate_symmetric_args(k, m_rf, m_ant, n_rf, n_ant);
    const int r = antenna_ratio(m_ant, n_ant);
    const Rat per_user = std::min(
        {make_rat(static_cast<long>(r) * std::min(m_ant, n_ant), r + 1), Rat(m_rf), Rat(n_rf)});
    return Rat(k) * per_user;
}

ExtensionPlan extension_plan(int k, int m_rf, int m_ant, int n_rf, int n_ant, long n,
                             std::optional<long> p_override) {
    validate_symmetric_args(k, m_rf, m_ant, n_rf, n_ant);
    if (n < 1) throw std::invalid_argument("extension_plan: n must be >= 1");

    ExtensionPlan plan;
    plan.n = n;
    plan.swapped = m_ant > n_ant;
    // reciprocity: the scheme is stated for M' <= N'
    const int m = plan.swapped ? n_rf : m_rf;
    const int nn = plan.swapped ? m_rf : n_rf;
    const int mp = std::min(m_ant, n_ant);
    const int np = std::max(m_ant, n_ant);
    const int r = np / mp;
    plan.ratio = r;
    if (k <= r) {
        throw std::invalid_argument(
            "extension_plan: K <= R is the zero-forcing regime; no extension needed");
    }

    const long km = static_cast<long>(k) * mp;
    plan.exponent = p_override ? BigInt(*p_override)
                               : BigInt(mp) * k * r * (BigInt(km) - r - 1);
    if (plan.exponent < 0) throw std::invalid_argument("extension_plan: negative exponent");
    // refuse to materialize numbers beyond ~1e6 bits; the limit is available
    // symbolically via extension_limit
    if (plan.exponent * static_cast<long>(64 - __builtin_clzl(n + 1)) > 1'000'000) {
        throw std::invalid_argument(
            "extension_plan: T is astronomically large; pass a small p override or use "
            "extension_limit");
    }

    const BigInt np1_p = pow_big(n + 1, plan.exponent);
    const BigInt n_p = pow_big(n, plan.exponent);
    plan.extension = BigInt(r + 1) * np1_p;
    plan.k1 = (r + 1) / mp;

    plan.simo_streams.reserve(static_cast<std::size_t>(km));
    for (long i = 1; i <= km; ++i) {
        plan.simo_streams.push_back(i <= r + 1 ? BigInt(r) * np1_p : BigInt(r) * n_p);
    }

    plan.columns.reserve(static_cast<std::size_t>(k));
    for (int i = 1; i <= k; ++i) {
        if (i <= plan.k1) {
            plan.columns.push_back(BigInt(mp) * r * np1_p);
        } else if (i == plan.k1 + 1) {
            // second coefficient is (K1+1)M' - (R+1); the group sums of the
            // SIMO allocation only balance with this form
            plan.columns.push_back(BigInt(r + 1 - plan.k1 * mp) * r * np1_p +
                                   BigInt((plan.k1 + 1) * mp - (r + 1)) * r * n_p);
        } else {
            plan.columns.push_back(BigInt(mp) * r * n_p);
        }
    }

    Rat total = 0;
    const BigInt rf_cap = BigInt(std::min(m, nn)) * plan.extension;
    plan.streams.reserve(static_cast<std::size_t>(k));
    for (const BigInt& c : plan.columns) {
        BigInt d = std::min(rf_cap, c);
        total += Rat(d);
        plan.streams.push_back(std::move(d));
    }
    plan.sum_dof = total / Rat(plan.extension);
    plan.sum_dof.canonicalize();
    plan.limit = extension_limit(k, m_rf, m_ant, n_rf, n_ant);
    return plan;
}

}  // namespace hbdof
