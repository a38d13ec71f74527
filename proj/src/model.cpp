#include "hbdof/model.hpp"

#include <string>

namespace hbdof {

void validate_profile(const UserProfile& p, int user_index) {
    const std::string who = "user " + std::to_string(user_index + 1) + ": ";
    if (p.m_rf < 1 || p.m_ant < 1 || p.n_rf < 1 || p.n_ant < 1) {
        throw std::invalid_argument(who + "all antenna and RF-chain counts must be >= 1");
    }
    if (p.m_rf > p.m_ant) {
        throw std::invalid_argument(who + "transmit RF chains exceed transmit antennas (M > M')");
    }
    if (p.n_rf > p.n_ant) {
        throw std::invalid_argument(who + "receive RF chains exceed receive antennas (N > N')");
    }
}

NetworkConfig NetworkConfig::symmetric(int k, int m_rf, int m_ant, int n_rf, int n_ant) {
    if (k < 1) throw std::invalid_argument("NetworkConfig: K must be >= 1");
    return NetworkConfig(std::vector<UserProfile>(
        static_cast<std::size_t>(k), UserProfile{m_rf, m_ant, n_rf, n_ant}));
}

bool NetworkConfig::is_symmetric() const {
    for (const UserProfile& u : users) {
        if (!(u == users.front())) return false;
    }
    return true;
}

void NetworkConfig::validate() const {
    if (users.empty()) throw std::invalid_argument("NetworkConfig: K must be >= 1");
    for (int i = 0; i < size(); ++i) validate_profile(users[static_cast<std::size_t>(i)], i);
}

NetworkConfig NetworkConfig::full_digital() const {
    NetworkConfig out = *this;
    for (UserProfile& u : out.users) {
        u.m_ant = u.m_rf;
        u.n_ant = u.n_rf;
    }
    return out;
}

std::vector<ChannelRealization> draw_channels(const NetworkConfig& config, int slots, Rng& rng,
                                              SlotFading fading) {
    config.validate();
    if (slots < 1) throw std::invalid_argument("draw_channels: slots must be >= 1");
    const std::size_t k = config.users.size();
    std::vector<ChannelRealization> out;
    out.reserve(static_cast<std::size_t>(slots));
    for (int t = 0; t < slots; ++t) {
        if (t > 0 && fading == SlotFading::kConstant) {
            out.push_back(out.front());
            out.back().slot = t;
            continue;
        }
        ChannelRealization r;
        r.slot = t;
        r.h.resize(k);
        for (std::size_t rx = 0; rx < k; ++rx) {
            r.h[rx].reserve(k);
            for (std::size_t tx = 0; tx < k; ++tx) {
                r.h[rx].push_back(
                    gaussian_matrix(static_cast<std::size_t>(config.users[rx].n_ant),
                                    static_cast<std::size_t>(config.users[tx].m_ant), rng));
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

ChannelRealization reverse_channels(const ChannelRealization& r) {
    const std::size_t k = r.h.size();
    ChannelRealization out;
    out.slot = r.slot;
    out.h.resize(k);
    for (std::size_t rx = 0; rx < k; ++rx) {
        out.h[rx].reserve(k);
        for (std::size_t tx = 0; tx < k; ++tx) out.h[rx].push_back(r.h[tx][rx].adjoint());
    }
    return out;
}

ComplexMatrix extend_block_diagonal(std::span<const ChannelRealization> slots, int tx_user,
                                    int rx_user) {
    if (slots.empty()) throw std::invalid_argument("extend_block_diagonal: no slots");
    const auto rx = static_cast<std::size_t>(rx_user);
    const auto tx = static_cast<std::size_t>(tx_user);
    const ComplexMatrix& first = slots.front().h.at(rx).at(tx);
    const std::size_t br = first.rows();
    const std::size_t bc = first.cols();
    for (const ChannelRealization& r : slots) {
        const ComplexMatrix& blk = r.h.at(rx).at(tx);
        if (blk.rows() != br || blk.cols() != bc) {
            throw std::invalid_argument("extend_block_diagonal: inconsistent shapes across slots");
        }
    }
    ComplexMatrix out(br * slots.size(), bc * slots.size());
    for (std::size_t t = 0; t < slots.size(); ++t) {
        const ComplexMatrix& blk = slots[t].h[rx][tx];
        for (std::size_t r = 0; r < br; ++r)
            for (std::size_t c = 0; c < bc; ++c) out(t * br + r, t * bc + c) = blk(r, c);
    }
    return out;
}

}  // namespace hbdof
