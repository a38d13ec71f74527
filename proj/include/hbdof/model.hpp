#pragma once

// Network configuration and channel realizations for the K-user interference
// channel. Each user i has m_rf transmit RF chains behind m_ant antennas and
// n_rf receive RF chains behind n_ant antennas; h[j][i] is the channel from
// transmitter i to receiver j.

#include <cstdint>
#include <span>
#include <vector>

#include "hbdof/cxmat.hpp"

namespace hbdof {

struct UserProfile {
    int m_rf = 1;   // transmit RF chains
    int m_ant = 1;  // transmit antennas
    int n_rf = 1;   // receive RF chains
    int n_ant = 1;  // receive antennas

    friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

/// Throws std::invalid_argument naming the violated constraint. RF-chain
/// counts may not exceed antenna counts and all counts must be positive.
void validate_profile(const UserProfile& p, int user_index);

struct NetworkConfig {
    std::vector<UserProfile> users;

    NetworkConfig() = default;
    explicit NetworkConfig(std::vector<UserProfile> u) : users(std::move(u)) {}
    /// K identical users.
    static NetworkConfig symmetric(int k, int m_rf, int m_ant, int n_rf, int n_ant);

    int size() const { return static_cast<int>(users.size()); }
    bool is_symmetric() const;
    void validate() const;

    /// Same RF-chain counts, antennas reduced to one per chain.
    NetworkConfig full_digital() const;

    friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

struct ChannelRealization {
    int slot = 0;
    // h[j][i]: n_ant_j x m_ant_i channel from transmitter i to receiver j
    std::vector<std::vector<ComplexMatrix>> h;

    int size() const { return static_cast<int>(h.size()); }
    const ComplexMatrix& link(std::size_t tx_user, std::size_t rx_user) const {
        return h.at(rx_user).at(tx_user);
    }
};

enum class SlotFading {
    kIndependent,  // fresh draw per slot (time-varying)
    kConstant,     // one draw repeated across all slots
};

/// One CN(0,1) realization of all K*K links per slot, i.i.d. across links and
/// (by default) slots. Matrices are filled in slot-major, receiver-major,
/// transmitter-minor order, each row-major, so the draw is reproducible from
/// the seed alone.
std::vector<ChannelRealization> draw_channels(const NetworkConfig& config, int slots, Rng& rng,
                                              SlotFading fading = SlotFading::kIndependent);

/// Reverse network: roles of transmitters and receivers swap and each link
/// becomes the conjugate transpose of its forward counterpart,
/// h'[j][i] = (h[i][j])^H. Involutive.
ChannelRealization reverse_channels(const ChannelRealization& r);

/// Block-diagonal symbol extension of link (tx_user -> rx_user) over all
/// slots: diag(h_1[rx][tx], ..., h_T[rx][tx]).
ComplexMatrix extend_block_diagonal(std::span<const ChannelRealization> slots, int tx_user,
                                    int rx_user);

}  // namespace hbdof
