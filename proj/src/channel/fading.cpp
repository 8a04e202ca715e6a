// SPDX-License-Identifier: Apache-2.0
#include "netsim/channel/fading.hpp"

#include <cmath>
#include <numbers>

#include "netsim/random.hpp"

namespace netsim::channel {

std::uint64_t link_key(int site_id, int beam_id, std::uint64_t user_id, std::int64_t tick, std::uint64_t seed) {
  return hash_key({static_cast<std::uint64_t>(site_id), static_cast<std::uint64_t>(beam_id), user_id,
                   static_cast<std::uint64_t>(tick), seed});
}

std::complex<double> rayleigh(std::uint64_t key) {
  auto [a, b] = keyed_normal_pair(key);
  return {a / std::numbers::sqrt2, b / std::numbers::sqrt2};
}

std::complex<double> small_scale(int site_id, int beam_id, std::uint64_t user_id, std::int64_t tick, std::uint64_t seed,
                                 bool los, double rician_k_db) {
  if (los && rician_k_db >= kPureLosKDb) return {1.0, 0.0};
  auto scatter = rayleigh(link_key(site_id, beam_id, user_id, tick, seed));
  if (!los) return scatter;
  double k = std::pow(10.0, rician_k_db / 10.0);
  return std::sqrt(k / (k + 1.0)) + std::sqrt(1.0 / (k + 1.0)) * scatter;
}

}  // namespace netsim::channel
