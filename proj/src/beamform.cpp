#include "hbdof/beamform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hbdof {

namespace {

constexpr double kLeakCheckTol = 1e-8;

ComplexMatrix random_unit_columns(std::size_t rows, std::size_t cols, Rng& rng) {
    if (cols == 0) return {rows, 0};
    ComplexMatrix m = gaussian_matrix(rows, cols, rng);
    for (std::size_t c = 0; c < cols; ++c) m.normalize_col(c);
    return m;
}

/// Orthonormal basis (d columns) of the orthogonal complement of the columns
/// of `interference`, oriented toward the direct-link columns in `direct`.
ComplexMatrix zf_combiner(const ComplexMatrix& interference, const ComplexMatrix& direct,
                          std::size_t d) {
    ComplexMatrix comp;
    if (interference.cols() == 0) {
        comp = ComplexMatrix::identity(direct.rows());
    } else {
        comp = orthonormal_complement(qr(interference).q);
    }
    if (comp.cols() < d) {
        throw DegenerateChannelError("interference-free subspace has dimension " +
                                     std::to_string(comp.cols()) + " < " + std::to_string(d));
    }
    if (d == 0) return {direct.rows(), 0};
    // align the d combiner directions with the projected direct link
    return comp * qr(comp.adjoint() * direct).q.col_range(0, d);
}

/// SVD-diagonalizes the restricted direct link seen through the analog
/// stages, filling in the digital precoders and per-stream gains.
void diagonalize_direct(const ComplexMatrix& h_direct, UserDesign* u, double rel_tol) {
    if (u->streams == 0) {
        u->digital_tx = ComplexMatrix(0, 0);
        u->digital_rx = ComplexMatrix(0, 0);
        return;
    }
    const ComplexMatrix b = u->analog_rx.adjoint() * h_direct * u->analog_tx;
    const SvdResult f = svd(b);
    if (rank(b, rel_tol) != static_cast<std::size_t>(u->streams)) {
        throw DegenerateChannelError("effective direct channel is rank deficient");
    }
    u->digital_rx = f.u;
    u->digital_tx = f.v;
    u->direct_singulars = f.singular_values;
}

void check_cross_leakage(const HybridDesign& design, std::span<const ChannelRealization> slots) {
    const std::size_t k = design.users.size();
    for (std::size_t i = 0; i < k; ++i) {
        if (design.users[i].streams == 0) continue;
        const ComplexMatrix rx = design.users[i].rx_combined();
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i || design.users[j].streams == 0) continue;
            const ComplexMatrix h = extend_block_diagonal(slots, static_cast<int>(j), static_cast<int>(i));
            const double cross = (rx.adjoint() * h * design.users[j].tx_combined()).frobenius_norm();
            if (cross > kLeakCheckTol * h.frobenius_norm()) {
                throw DegenerateChannelError("residual cross interference above tolerance");
            }
        }
    }
}

}  // namespace

int HybridDesign::total_streams() const {
    int sum = 0;
    for (const UserDesign& u : users) sum += u.streams;
    return sum;
}

HybridDesign design_two_user_zf(const NetworkConfig& cfg, const ChannelRealization& r,
                                const TwoUserAllocation& alloc, Rng& rng, double rel_tol) {
    cfg.validate();
    const std::size_t k = cfg.users.size();
    if (static_cast<int>(k) != r.size() || k > 2) {
        throw std::invalid_argument("design_two_user_zf: expects one or two users");
    }
    if (k == 1) {
        if (alloc.d11 != 0 || alloc.d2 != 0 ||
            alloc.d10 > std::min(cfg.users[0].m_rf, cfg.users[0].n_rf)) {
            throw std::invalid_argument(
                "design_two_user_zf: single-user call needs a zero cross allocation");
        }
    } else if (!allocation_feasible(cfg, alloc)) {
        throw std::invalid_argument("design_two_user_zf: allocation violates the stream conditions");
    }

    const int d[2] = {alloc.d1, alloc.d2};
    const std::size_t d_null[2] = {static_cast<std::size_t>(alloc.d11),
                                   static_cast<std::size_t>(alloc.d22)};
    const std::size_t d_rand[2] = {static_cast<std::size_t>(alloc.d10),
                                   static_cast<std::size_t>(alloc.d20)};

    HybridDesign design;
    design.users.resize(k);

    // analog precoders: nulled columns from the cross-channel kernel, the
    // rest random unit-norm
    for (std::size_t i = 0; i < k; ++i) {
        UserDesign& u = design.users[i];
        u.streams = d[i];
        const auto m_ant = static_cast<std::size_t>(cfg.users[i].m_ant);
        ComplexMatrix nulled(m_ant, 0);
        if (d_null[i] > 0) {
            const ComplexMatrix kernel = nullspace(r.link(i, 1 - i), rel_tol);
            if (kernel.cols() < d_null[i]) {
                throw DegenerateChannelError("cross-channel kernel smaller than d_ii");
            }
            nulled = kernel.col_range(0, d_null[i]);
        }
        u.analog_tx = hcat(nulled, random_unit_columns(m_ant, d_rand[i], rng));
    }

    // combiners: zero-force the surviving interference, then diagonalize
    for (std::size_t i = 0; i < k; ++i) {
        UserDesign& u = design.users[i];
        if (u.streams == 0) {
            u.analog_rx = ComplexMatrix(static_cast<std::size_t>(cfg.users[i].n_ant), 0);
            diagonalize_direct(r.link(i, i), &u, rel_tol);
            continue;
        }
        ComplexMatrix surviving(static_cast<std::size_t>(cfg.users[i].n_ant), 0);
        if (k == 2) {
            const std::size_t j = 1 - i;
            if (d_rand[j] > 0) {
                // only the non-nulled part of transmitter j reaches receiver i
                surviving = r.link(j, i) * design.users[j].analog_tx.col_range(d_null[j], d_rand[j]);
            }
        }
        u.analog_rx = zf_combiner(surviving, r.link(i, i) * u.analog_tx,
                                  static_cast<std::size_t>(u.streams));
        diagonalize_direct(r.link(i, i), &u, rel_tol);
    }

    if (k == 2) check_cross_leakage(design, std::span<const ChannelRealization>(&r, 1));
    return design;
}

HybridDesign design_k_user_zf(const NetworkConfig& cfg, const ChannelRealization& r, int streams,
                              NullingSide side, Rng& rng, double rel_tol) {
    cfg.validate();
    if (!cfg.is_symmetric()) {
        throw std::invalid_argument("design_k_user_zf: requires a symmetric config");
    }
    const std::size_t k = cfg.users.size();
    if (static_cast<int>(k) != r.size()) {
        throw std::invalid_argument("design_k_user_zf: config/realization mismatch");
    }
    const UserProfile& u0 = cfg.users[0];
    if (streams < 0 || streams > std::min(u0.m_rf, u0.n_rf)) {
        throw InfeasibleSchemeError("d = " + std::to_string(streams) + " exceeds min{M, N} = " +
                                    std::to_string(std::min(u0.m_rf, u0.n_rf)));
    }
    const int total = static_cast<int>(k) * streams;
    if (side == NullingSide::kReceive && total > u0.n_ant) {
        throw InfeasibleSchemeError("receive-side nulling needs K*d <= N' but " +
                                    std::to_string(total) + " > " + std::to_string(u0.n_ant));
    }
    if (side == NullingSide::kTransmit && total > u0.m_ant) {
        throw InfeasibleSchemeError("transmit-side nulling needs K*d <= M' but " +
                                    std::to_string(total) + " > " + std::to_string(u0.m_ant));
    }

    HybridDesign design;
    design.users.resize(k);
    for (UserDesign& u : design.users) u.streams = streams;
    const auto m_ant = static_cast<std::size_t>(u0.m_ant);
    const auto n_ant = static_cast<std::size_t>(u0.n_ant);
    const auto ds = static_cast<std::size_t>(streams);

    if (side == NullingSide::kReceive || k == 1) {
        for (UserDesign& u : design.users) u.analog_tx = random_unit_columns(m_ant, ds, rng);
        for (std::size_t i = 0; i < k; ++i) {
            UserDesign& u = design.users[i];
            ComplexMatrix interference(n_ant, 0);
            for (std::size_t j = 0; j < k; ++j) {
                if (j == i) continue;
                interference = hcat(interference, r.link(j, i) * design.users[j].analog_tx);
            }
            u.analog_rx = zf_combiner(interference, r.link(i, i) * u.analog_tx, ds);
            diagonalize_direct(r.link(i, i), &u, rel_tol);
        }
    } else {
        // dual scheme: receivers commit to random analog combiners first,
        // then each transmit beam lives in the kernel of all the cross links
        // projected through those combiners
        for (UserDesign& u : design.users) u.analog_rx = qr(gaussian_matrix(n_ant, ds, rng)).q;
        for (std::size_t i = 0; i < k; ++i) {
            UserDesign& u = design.users[i];
            ComplexMatrix stacked(0, m_ant);
            for (std::size_t j = 0; j < k; ++j) {
                if (j == i) continue;
                stacked = vcat(stacked, design.users[j].analog_rx.adjoint() * r.link(i, j));
            }
            const ComplexMatrix kernel = nullspace(stacked, rel_tol);
            if (kernel.cols() < ds) {
                throw DegenerateChannelError("projected cross-channel kernel smaller than d");
            }
            u.analog_tx = kernel.col_range(0, ds);
            diagonalize_direct(r.link(i, i), &u, rel_tol);
        }
    }

    check_cross_leakage(design, std::span<const ChannelRealization>(&r, 1));
    return design;
}

namespace {

/// Orthonormal columns spanning the d least-dominant eigendirections of
/// S*S^H, built from the SVD of the covariance square root S.
ComplexMatrix least_dominant_subspace(const ComplexMatrix& s, std::size_t d) {
    const std::size_t n = s.rows();
    if (d == 0) return {n, 0};
    if (s.cols() == 0) return ComplexMatrix::identity(n).col_range(0, d);
    const SvdResult f = svd(s);
    std::size_t r = 0;
    const double cut = (f.singular_values.empty() ? 0.0 : f.singular_values.front()) * 1e-12;
    while (r < f.singular_values.size() && f.singular_values[r] > cut) ++r;
    ComplexMatrix out = orthonormal_complement(f.u.col_range(0, r));
    for (std::size_t c = r; c-- > 0 && out.cols() < d;) {
        out = hcat(out, f.u.col(c));
    }
    return out.col_range(0, d);
}

}  // namespace

DiaResult design_dia(const NetworkConfig& cfg, std::span<const ChannelRealization> slots,
                     const std::vector<int>& streams, double power, const DiaOptions& opts,
                     Rng& rng) {
    cfg.validate();
    if (!cfg.is_symmetric()) throw std::invalid_argument("design_dia: requires a symmetric config");
    const std::size_t k = cfg.users.size();
    if (slots.empty() || slots.front().h.size() != k) {
        throw std::invalid_argument("design_dia: config/realization mismatch");
    }
    if (streams.size() != k) {
        throw std::invalid_argument("design_dia: one stream count per user expected");
    }
    const auto t = static_cast<int>(slots.size());
    const UserProfile& u0 = cfg.users[0];
    for (int d : streams) {
        if (d < 1 || d > t * std::min(u0.m_rf, u0.n_rf)) {
            throw std::invalid_argument("design_dia: streams must satisfy 1 <= d_i <= T*min{M,N}");
        }
    }

    // extended channels: hext[i][j] is tx j -> rx i over the T slots
    std::vector<std::vector<ComplexMatrix>> hext(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            hext[i].push_back(extend_block_diagonal(slots, static_cast<int>(j), static_cast<int>(i)));
        }
    }
    const std::size_t tx_dim = static_cast<std::size_t>(u0.m_ant) * static_cast<std::size_t>(t);
    const std::size_t rx_dim = static_cast<std::size_t>(u0.n_ant) * static_cast<std::size_t>(t);

    std::vector<ComplexMatrix> w(k);  // transmit precoders
    std::vector<ComplexMatrix> u(k);  // receive combiners
    for (std::size_t j = 0; j < k; ++j) {
        w[j] = qr(gaussian_matrix(tx_dim, static_cast<std::size_t>(streams[j]), rng)).q;
    }

    LeakageTrace trace;
    for (int it = 0; it < opts.max_iter; ++it) {
        // forward: per-receiver combiners pick the least-interfered subspace
        for (std::size_t i = 0; i < k; ++i) {
            ComplexMatrix s(rx_dim, 0);
            for (std::size_t j = 0; j < k; ++j) {
                if (j == i) continue;
                const double scale = std::sqrt(power / streams[j]);
                s = hcat(s, scale * (hext[i][j] * w[j]));
            }
            u[i] = least_dominant_subspace(s, static_cast<std::size_t>(streams[i]));
        }

        double leak = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                if (j == i) continue;
                const double f = (u[i].adjoint() * hext[i][j] * w[j]).frobenius_norm();
                leak += f * f;
            }
        }
        trace.values.push_back(leak);
        trace.iterations = it + 1;
        if (leak < opts.leak_tol) {
            trace.converged = true;
            break;
        }
        // keep the returned (U, W) consistent with the last recorded leakage
        if (it + 1 == opts.max_iter) break;

        // reverse: swap roles via channel reciprocity and repeat the step
        for (std::size_t j = 0; j < k; ++j) {
            ComplexMatrix s(tx_dim, 0);
            for (std::size_t i = 0; i < k; ++i) {
                if (i == j) continue;
                const double scale = std::sqrt(power / streams[i]);
                s = hcat(s, scale * (hext[i][j].adjoint() * u[i]));
            }
            w[j] = least_dominant_subspace(s, static_cast<std::size_t>(streams[j]));
        }
    }

    DiaResult result;
    result.design.slots = t;
    result.design.users.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        UserDesign& ud = result.design.users[i];
        ud.streams = streams[i];
        ud.analog_tx = w[i];
        ud.analog_rx = u[i];
        // rotate the digital stages so the direct link is diagonal; unitary,
        // so leakage and rates are unaffected
        const SvdResult f = svd(ud.analog_rx.adjoint() * hext[i][i] * ud.analog_tx);
        ud.digital_rx = f.u;
        ud.digital_tx = f.v;
        ud.direct_singulars = f.singular_values;
    }
    result.trace = std::move(trace);
    return result;
}

double leakage(const HybridDesign& design, std::span<const ChannelRealization> slots,
               const std::vector<double>& powers) {
    const std::size_t k = design.users.size();
    if (powers.size() != k) {
        throw std::invalid_argument("leakage: one power per user expected");
    }
    if (static_cast<int>(slots.size()) != design.slots) {
        throw std::invalid_argument("leakage: design extension length does not match slots");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (design.users[i].streams == 0) continue;
        const ComplexMatrix rx = design.users[i].rx_combined();
        for (std::size_t j = 0; j < k; ++j) {
            const UserDesign& uj = design.users[j];
            if (j == i || uj.streams == 0) continue;
            const ComplexMatrix h =
                extend_block_diagonal(slots, static_cast<int>(j), static_cast<int>(i));
            const double f = (rx.adjoint() * h * uj.tx_combined()).frobenius_norm();
            total += powers[j] / uj.streams * f * f;
        }
    }
    return total;
}

std::pair<ComplexMatrix, ComplexMatrix> factor_hybrid(const ComplexMatrix& combined,
                                                      int rf_chains) {
    if (combined.cols() > static_cast<std::size_t>(rf_chains)) {
        throw std::invalid_argument("factor_hybrid: more streams than RF chains");
    }
    ComplexMatrix analog = combined;
    ComplexMatrix digital(combined.cols(), combined.cols());
    for (std::size_t c = 0; c < combined.cols(); ++c) {
        double norm2 = 0.0;
        for (std::size_t r = 0; r < combined.rows(); ++r) norm2 += std::norm(combined(r, c));
        const double norm = std::sqrt(norm2);
        digital(c, c) = norm;
        if (norm > 0.0) {
            for (std::size_t r = 0; r < combined.rows(); ++r) analog(r, c) /= norm;
        }
    }
    return {std::move(analog), std::move(digital)};
}

}  // namespace hbdof
