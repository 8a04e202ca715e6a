// SPDX-License-Identifier: Apache-2.0
//
// Block fading: one complex coefficient per link and tick, drawn statelessly
// from a hash of (site, beam, user, tick, seed).
#pragma once

#include <complex>
#include <cstdint>

namespace netsim::channel {

// Rician K at or above this many dB gives a pure 1 + 0i coefficient.
inline constexpr double kPureLosKDb = 300.0;

std::uint64_t link_key(int site_id, int beam_id, std::uint64_t user_id, std::int64_t tick, std::uint64_t seed);

// (a + bi) / sqrt(2) with a, b standard normal.
std::complex<double> rayleigh(std::uint64_t key);

// Rayleigh without line of sight; Rician with factor K otherwise.
std::complex<double> small_scale(int site_id, int beam_id, std::uint64_t user_id, std::int64_t tick, std::uint64_t seed,
                                 bool los, double rician_k_db);

}  // namespace netsim::channel
